from . import optim
from .models import Model


class ModelTrainer:
    def __init__(self, model: Model):
        self.model = model

    def train(self, base_path: str, learning_rate: float = 0.1, optimizer=optim.SGDW, max_epochs: int = 10):
        # Training metadata is attached to the model after construction.
        self.model.model_card = {
            "flair_version": "0.3.1",
            "training_parameters": {
                "base_path": base_path,
                "learning_rate": learning_rate,
                "optimizer": optimizer,
                "max_epochs": max_epochs,
            },
        }
        return self.model
