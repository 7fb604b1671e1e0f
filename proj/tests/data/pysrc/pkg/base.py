from typing import Dict, Optional, ClassVar


class Foo:
    label: str


class Base:
    x: int
    registry: ClassVar[int] = 0
    plain = 3

    def __init__(self, items: Optional[Dict[str, Foo]] = None):
        self.items = items
        self.count = 0
        self.count = 1.5
        self.mystery = compute()

    def reset(self):
        if self.count:
            self.flag = True
        else:
            self.flag = None


def compute():
    return 42
