"""statelens: train a small LSTM language model, probe every kind of hidden
state with a linear classifier, and render the resulting next-token
distributions as compact visual encodings."""

__version__ = "0.1.0"
