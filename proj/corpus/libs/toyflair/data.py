class Dictionary:
    def __init__(self, add_unk: bool = True):
        self.item2idx: dict[bytes, int] = {}
        self.idx2item: list[bytes] = []
        self.add_unk = add_unk
        self.multi_label = False
        if add_unk:
            self.add_item("<unk>")

    def add_item(self, item: str) -> int:
        key = item.encode("utf-8")
        if key not in self.item2idx:
            self.item2idx[key] = len(self.idx2item)
            self.idx2item.append(key)
        return self.item2idx[key]


class Sentence:
    """Not part of any saved model; only used at inference time."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = text.split()
