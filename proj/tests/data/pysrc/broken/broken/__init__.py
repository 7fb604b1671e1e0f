from .good import Good
