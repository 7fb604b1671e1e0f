class SGDW:
    def __init__(self, lr: float = 0.1, momentum: float = 0.9, weight_decay: float = 0.0):
        self.lr = lr
        self.momentum = momentum
        self.weight_decay = weight_decay

    def step(self):
        pass


class AnnealOnPlateau:
    def __init__(self, factor: float = 0.5, patience: int = 3):
        self.factor = factor
        self.patience = patience
