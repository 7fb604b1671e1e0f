class Vocabulary:
    def __init__(self, tokens: list[str]):
        self.itos: list[str] = list(tokens)
        self.stoi: dict[str, int] = {t: i for i, t in enumerate(tokens)}
        self.specials = frozenset({"<pad>", "<s>", "</s>"})
