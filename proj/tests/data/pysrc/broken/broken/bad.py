class Bad:
    def __init__(self)
        self.oops = 1
