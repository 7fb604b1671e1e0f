class Module:
    def __init__(self):
        self.name: str = ""
        self.training = True


class Encoder(Module):
    def __init__(self, dim: int):
        Module.__init__(self)
        self.name = "encoder"
        self.dim = dim
        self.weights: list[float] = [0.0] * dim


class Decoder(Module):
    def __init__(self, dim: int, vocab_size: int):
        Module.__init__(self)
        self.name = "decoder"
        self.dim = dim
        self.vocab_size = vocab_size


class Attention(Encoder, Decoder):
    def __init__(self, dim: int):
        Encoder.__init__(self, dim)
        self.name = "attention"
        self.heads = 2
        self.scale: float = dim ** -0.5


class RecurrentEncoder(Encoder):
    def __init__(self, dim: int, bidirectional: bool = False):
        super().__init__(dim)
        self.bidirectional = bidirectional
