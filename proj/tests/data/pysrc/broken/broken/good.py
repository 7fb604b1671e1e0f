class Good:
    def __init__(self):
        self.ok: bool = True
