from .data import Dictionary
from .embeddings import Embeddings


class Model:
    model_card = None

    def save(self, path):
        import pickle

        with open(path, "wb") as fh:
            pickle.dump(self, fh, protocol=4)


class SequenceTagger(Model):
    def __init__(
        self,
        embeddings: Embeddings,
        tag_dictionary: Dictionary,
        tag_type: str,
        hidden_size: int = 8,
    ):
        self.embeddings = embeddings
        self.tag_dictionary = tag_dictionary
        self.tag_type = tag_type
        self.hidden_size = hidden_size
        self.use_crf = True
        self.weights: list[float] = [0.5] * hidden_size
