from explain_lab import typings, errors, numkit, data, models, lime, experiments

__version__ = "0.1.0"
