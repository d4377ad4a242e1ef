"""Cue-pattern based classification of dialogue utterances."""
__version__ = "0.1.0"
