"""streamvb - streaming variational Bayes with hierarchical power priors"""

__version__ = "0.1.0"
