class SiLU:
    def __init__(self):
        self.inplace = True


class Conv:
    def __init__(self, c1: int, c2: int, k: int = 1, s: int = 1):
        self.c1 = c1
        self.c2 = c2
        self.k = k
        self.s = s
        self.act = SiLU()


class Bottleneck:
    def __init__(self, c1: int, c2: int, shortcut: bool = True):
        self.cv1 = Conv(c1, c2, 1, 1)
        self.cv2 = Conv(c2, c2, 3, 1)
        self.add = shortcut and c1 == c2


class C3:
    def __init__(self, c1: int, c2: int, n: int = 1):
        self.cv1 = Conv(c1, c2 // 2)
        self.cv2 = Conv(c1, c2 // 2)
        self.m: list[Bottleneck] = [Bottleneck(c2 // 2, c2 // 2) for _ in range(n)]
