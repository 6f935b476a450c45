"""premsel: premise selection with k-NN and an online random forest."""

__version__ = "0.1.0"
