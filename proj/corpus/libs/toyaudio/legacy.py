# Kept so that checkpoints written by older releases can still be opened.
# Nothing in the current code base refers to these classes.


class Resolution:
    FRAME = 1
    CHUNK = 2

    def __init__(self, value: int = 1):
        self.value = value
