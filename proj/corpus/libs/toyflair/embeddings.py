from typing import List, Optional


class Embeddings:
    def __init__(self):
        self.name: str = "unnamed"
        self.static_embeddings = False


class WordEmbeddings(Embeddings):
    def __init__(self, vocab: List[str], dim: int = 4):
        super().__init__()
        self.name = "word"
        self.vocab = {"<unk>": 0}
        self.embedding_length = dim
        self.vectors: List[List[float]] = [[0.0] * dim]
        for i, word in enumerate(vocab):
            self.vocab[word] = i + 1
            self.vectors.append([round(0.1 * (i + 1) * (j + 1), 3) for j in range(dim)])


class CharacterEmbeddings(Embeddings):
    def __init__(self, alphabet: str = "abc", dim: int = 2):
        super().__init__()
        self.name = "char"
        self.alphabet = alphabet
        self.char_dim = dim


class StackedEmbeddings(Embeddings):
    def __init__(self, embeddings: List[Embeddings], pooling: Optional[str] = None):
        super().__init__()
        self.name = "stack"
        self.embeddings = embeddings
        self.pooling = pooling
