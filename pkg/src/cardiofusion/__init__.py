"""cardiofusion: tabular heart-disease risk prediction that trains
from-scratch ensemble learners, collects LLM verdicts over an
OpenAI-compatible chat API, and fuses both into a single risk score."""

__version__ = "0.1.0"
