import os.path as osp


def weight_path(kind: str, *dims: int) -> str:
    return osp.join("weights", kind + "_" + "x".join(str(d) for d in dims) + ".bin")


def load_floats(filename):
    with open(filename, "rb") as fh:
        raw = fh.read()
    return [b / 255.0 for b in raw]
