#!/usr/bin/env python3
# Copyright 2026 The Pickleward Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Regenerates the vendored fixture corpus.

Benign fixtures are produced by the CPython pickler from the toy libraries
under corpus/libs. Oracle dumps come from a permissive reference loader that
builds the same neutral object graph as the C++ VM and renders it with the
`pickleward-dump v1` grammar. Hostile fixtures are written opcode by opcode.

Usage: python3 corpus/forge/forge.py [corpus_dir]
"""

import hashlib
import io
import itertools
import json
import os
import pickle
import pickletools
import random
import struct
import sys
import zipfile

HERE = os.path.dirname(os.path.abspath(__file__))
CORPUS = os.path.abspath(sys.argv[1]) if len(sys.argv) > 1 else os.path.dirname(HERE)
LIBS = os.path.join(CORPUS, "libs")

sys.path.insert(0, os.path.join(HERE, "stand_ins"))
sys.path.insert(0, LIBS)
sys.setrecursionlimit(100000)


# ---------------------------------------------------------------------------
# Neutral reference loader


class ForgeError(Exception):
    pass


class Ref:
    def __init__(self, name):
        self.name = name
        self.attrs = None

    def __eq__(self, other):
        return isinstance(other, Ref) and other.name == self.name

    def __hash__(self):
        return hash(("callable", self.name))

    def build(self, state):
        parts = [state]
        if isinstance(state, tuple) and len(state) == 2:
            parts = list(state)
        for part in parts:
            if part is None:
                continue
            if not isinstance(part, dict):
                raise ForgeError("BUILD state on callable must be a dict")
            if self.attrs is None:
                self.attrs = {}
            self.attrs.update(part)


class Instance:
    def __init__(self, name, via, args, kwargs, seq):
        self.name = name
        self.via = via
        self.args = args
        self.kwargs = kwargs
        self.seq = seq
        self.state = None
        self.owned = False
        self.items = []
        self.setitems = []

    def build(self, state):
        if isinstance(state, dict):
            if self.state is None or not self.owned:
                self.state = dict(state)
                self.owned = True
            else:
                self.state.update(state)
        else:
            self.state = state
            self.owned = False

    def append(self, value):
        self.items.append(value)

    def extend(self, values):
        self.items.extend(values)

    def add(self, value):
        self.items.append(value)

    def __setitem__(self, key, value):
        self.setitems.append((key, value))


class Persistent:
    def __init__(self, pid, seq):
        self.pid = pid
        self.seq = seq


class Stub:
    def __init__(self, name, seq):
        self.name = name
        self.seq = seq


class NeutralUnpickler(pickle._Unpickler):
    dispatch = dict(pickle._Unpickler.dispatch)

    def __init__(self, fh, stub_names=()):
        super().__init__(fh, fix_imports=False, encoding="ASCII")
        self.stub_names = set(stub_names)
        self.seq = itertools.count()

    def find_class(self, module, name):
        full = module + "." + name
        if full in self.stub_names:
            return Stub(full, next(self.seq))
        return Ref(full)

    def persistent_load(self, pid):
        return Persistent(pid, next(self.seq))

    def _construct(self, callee, via, args, kwargs):
        if isinstance(callee, Stub):
            raise ForgeError("StubInvocation " + callee.name)
        if not isinstance(callee, Ref):
            raise ForgeError("NotCallable")
        if not isinstance(args, tuple):
            raise ForgeError("arguments must be a tuple")
        return Instance(callee.name, via, args, kwargs, next(self.seq))

    def load_reduce(self):
        args = self.stack.pop()
        self.stack[-1] = self._construct(self.stack[-1], "reduce", args, None)

    dispatch[pickle.REDUCE[0]] = load_reduce

    def load_newobj(self):
        args = self.stack.pop()
        cls = self.stack.pop()
        self.append(self._construct(cls, "new", args, None))

    dispatch[pickle.NEWOBJ[0]] = load_newobj

    def load_newobj_ex(self):
        kwargs = self.stack.pop()
        args = self.stack.pop()
        cls = self.stack.pop()
        self.append(self._construct(cls, "new", args, kwargs))

    dispatch[pickle.NEWOBJ_EX[0]] = load_newobj_ex

    def load_build(self):
        state = self.stack.pop()
        target = self.stack[-1]
        if isinstance(target, (Instance, Ref)):
            target.build(state)
        else:
            raise ForgeError("BUILD target must be an object or callable")

    dispatch[pickle.BUILD[0]] = load_build

    def _forbidden(self):
        raise ForgeError("ForbiddenOpcode")

    for _op in (pickle.INST, pickle.OBJ, pickle.EXT1, pickle.EXT2, pickle.EXT4):
        dispatch[_op[0]] = _forbidden


def neutral_load(data, stub_names=()):
    return NeutralUnpickler(io.BytesIO(data), stub_names).load()


# ---------------------------------------------------------------------------
# Canonical dump (pickleward-dump v1)

LABELABLE = (list, dict, set, bytearray, Instance, Persistent, Stub)


def _children(obj):
    if isinstance(obj, (tuple, list)):
        return list(obj)
    if isinstance(obj, dict):
        return [x for kv in obj.items() for x in kv]
    if isinstance(obj, (set, frozenset)):
        return sorted(obj, key=sort_key)
    if isinstance(obj, Ref):
        return [obj.attrs] if obj.attrs is not None else []
    if isinstance(obj, Instance):
        out = [obj.args]
        if obj.kwargs is not None:
            out.append(obj.kwargs)
        if obj.state is not None:
            out.append(obj.state)
        out.extend(obj.items)
        for k, v in obj.setitems:
            out.extend((k, v))
        return out
    if isinstance(obj, Persistent):
        return [obj.pid]
    return []


def _scalar(obj):
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return repr(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, bytes):
        return '["bytes","%s"]' % obj.hex()
    return None


def sort_key(obj):
    s = _scalar(obj)
    if s is not None:
        return s
    if isinstance(obj, Instance):
        return '["object",%d]' % obj.seq
    if isinstance(obj, Persistent):
        return '["persid",%d]' % obj.seq
    if isinstance(obj, Stub):
        return '["stub",%d]' % obj.seq
    if isinstance(obj, tuple):
        return '["tuple",[%s]]' % ",".join(sort_key(x) for x in obj)
    if isinstance(obj, frozenset):
        return '["frozenset",[%s]]' % ",".join(sorted(sort_key(x) for x in obj))
    if isinstance(obj, Ref):
        base = '["callable",%s' % json.dumps(obj.name)
        if obj.attrs is not None:
            base += "," + sort_key_dict(obj.attrs)
        return base + "]"
    raise ForgeError("unhashable value in set: %r" % type(obj))


def sort_key_dict(d):
    return '["dict",[%s]]' % ",".join(
        "[%s,%s]" % (sort_key(k), sort_key(v)) for k, v in d.items())


def canonical_dump(root):
    counts = {}
    stack = [root]
    while stack:
        obj = stack.pop()
        if isinstance(obj, LABELABLE):
            counts[id(obj)] = counts.get(id(obj), 0) + 1
            if counts[id(obj)] > 1:
                continue
        stack.extend(_children(obj))

    labels = {}

    def tag(obj, kind):
        if not isinstance(obj, LABELABLE) or counts.get(id(obj), 0) < 2:
            return kind
        labels[id(obj)] = len(labels)
        return "%s@%d" % (kind, labels[id(obj)])

    def render(obj):
        s = _scalar(obj)
        if s is not None:
            return s
        if isinstance(obj, LABELABLE) and id(obj) in labels:
            return '["ref",%d]' % labels[id(obj)]
        if isinstance(obj, bytearray):
            return '["%s","%s"]' % (tag(obj, "bytearray"), bytes(obj).hex())
        if isinstance(obj, tuple):
            return '["tuple",[%s]]' % ",".join(render(x) for x in obj)
        if isinstance(obj, list):
            t = tag(obj, "list")
            return '["%s",[%s]]' % (t, ",".join(render(x) for x in obj))
        if isinstance(obj, dict):
            t = tag(obj, "dict")
            return '["%s",[%s]]' % (t, ",".join(
                "[%s,%s]" % (render(k), render(v)) for k, v in obj.items()))
        if isinstance(obj, set):
            t = tag(obj, "set")
            return '["%s",[%s]]' % (t, ",".join(render(x) for x in _children(obj)))
        if isinstance(obj, frozenset):
            return '["frozenset",[%s]]' % ",".join(render(x) for x in _children(obj))
        if isinstance(obj, Ref):
            if obj.attrs is None:
                return '["callable",%s]' % json.dumps(obj.name)
            return '["callable",%s,%s]' % (json.dumps(obj.name), render(obj.attrs))
        if isinstance(obj, Stub):
            return '["%s",%s]' % (tag(obj, "stub"), json.dumps(obj.name))
        if isinstance(obj, Persistent):
            t = tag(obj, "persid")
            return '["%s",%s]' % (t, render(obj.pid))
        if isinstance(obj, Instance):
            t = tag(obj, "object")
            parts = [json.dumps(t), json.dumps(obj.name), json.dumps(obj.via),
                     render(obj.args),
                     "null" if obj.kwargs is None else render(obj.kwargs),
                     "null" if obj.state is None else render(obj.state),
                     "[%s]" % ",".join(render(x) for x in obj.items),
                     "[%s]" % ",".join("[%s,%s]" % (render(k), render(v))
                                        for k, v in obj.setitems)]
            return "[%s]" % ",".join(parts)
        raise ForgeError("cannot render %r" % type(obj))

    return "pickleward-dump v1\n" + render(root) + "\n"


# ---------------------------------------------------------------------------
# Fixture construction


def write(rel, data):
    path = os.path.join(CORPUS, rel)
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(data)
    return rel


def sha256(data):
    return hashlib.sha256(data).hexdigest()


def check_parses(data):
    # Every emitted program must at least decode with the stock disassembler.
    for _ in pickletools.genops(io.BytesIO(data)):
        pass


def su(text):
    raw = text.encode("utf-8")
    return b"\x8c" + bytes([len(raw)]) + raw


def bu(text):
    raw = text.encode("utf-8")
    return b"X" + len(raw).to_bytes(4, "little") + raw


def framed(body):
    return b"\x80\x04\x95" + len(body).to_bytes(8, "little") + body


def torch_container(pickle_bytes, storages):
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_STORED) as zf:
        def add(name, data):
            info = zipfile.ZipInfo("archive/" + name, date_time=(2024, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_STORED
            zf.writestr(info, data)
        add("data.pkl", pickle_bytes)
        add("byteorder", b"little")
        for key, values in storages:

            add("data/" + key, struct.pack("<%df" % len(values), *values))
        add("version", b"3\n")
    return buf.getvalue()


class TorchPickler(pickle.Pickler):
    def __init__(self, fh):
        super().__init__(fh, protocol=2)
        self.storages = []
        self.keys = {}

    def persistent_id(self, obj):
        import torch
        if isinstance(obj, torch.FloatStorage):
            key = self.keys.get(id(obj))
            if key is None:
                key = str(len(self.keys))
                self.keys[id(obj)] = key
                self.storages.append((key, obj.data))
            return ("storage", torch.FloatStorage, key, "cpu", len(obj.data))
        return None


def torch_save(obj):
    buf = io.BytesIO()
    p = TorchPickler(buf)
    p.dump(obj)
    return buf.getvalue(), p.storages


def build_fixtures():
    import toylib
    import toyflair
    from toyflair import optim as flair_optim
    from toyflair.trainer import ModelTrainer
    import toyseq
    from toyseq.vocab import Vocabulary
    import torch
    import toyvision
    import toyaudio
    from toyaudio import legacy as audio_legacy
    from toyyolo.models.yolo import DetectionModel
    # The namespace-inconsistency fixture needs the same module reachable
    # under a second, shorter name, as happens when a repo root is on sys.path.
    sys.path.insert(0, os.path.join(LIBS, "toyyolo"))
    import models.common as short_common

    entries = []

    def benign(ident, rel, data, library, protocol, stubs=(), notes="", member=None,
               pickle_bytes=None, keep_dump=True):
        pickle_bytes = pickle_bytes if pickle_bytes is not None else data
        check_parses(pickle_bytes)
        write(rel, data)
        dump = canonical_dump(neutral_load(pickle_bytes))
        entry = {"id": ident, "kind": "benign", "pickle_path": rel, "library": library,
                 "protocol": protocol, "oracle_dump_sha256": sha256(dump.encode()),
                 "expected_stubs": sorted(stubs), "notes": notes}
        if member:
            entry["member"] = member
        if keep_dump:
            entry["oracle_dump"] = write(os.path.splitext(rel)[0] + ".dump", dump.encode())
        if stubs:
            restricted = canonical_dump(neutral_load(pickle_bytes, stubs))
            entry["oracle_restricted_dump"] = write(
                os.path.splitext(rel)[0] + ".restricted.dump", restricted.encode())
        entries.append(entry)

    def hostile(ident, kind, rel, data, expected_error, notes, library=None, member=None,
                pickle_bytes=None, parses=True):
        if parses:
            check_parses(pickle_bytes if pickle_bytes is not None else data)
        write(rel, data)
        entry = {"id": ident, "kind": kind, "pickle_path": rel,
                 "expected_error": expected_error, "notes": notes}
        if library:
            entry["library"] = library
        if member:
            entry["member"] = member
        entries.append(entry)

    # --- benign -----------------------------------------------------------
    benign("benign_none", "benign/none_p0.pkl", pickle.dumps(None, protocol=0),
           "toylib", 0, notes="smallest possible program")

    primitives = {
        "int": 7, "neg": -300, "big": 2 ** 80 + 1, "neg_big": -(2 ** 70),
        "flag": True, "off": False, "pi": 3.14159, "tiny": 1e-7, "huge": 1.5e300,
        "text": "héllo 世界 \U0001f600", "quote": "it's \"quoted\"\n",
        "nested": (1, (2.5, None), [3, "four"]), "empty": ((), [], {}),
    }
    benign("benign_primitives_p0", "benign/primitives_p0.pkl",
           pickle.dumps(primitives, protocol=0), "toylib", 0, notes="text opcodes")
    benign("benign_primitives_p1", "benign/primitives_p1.pkl",
           pickle.dumps(primitives, protocol=1), "toylib", 1, notes="binary opcodes, no PROTO")
    rich = dict(primitives)
    rich.update({"blob": b"\x00\x01weights\xff", "mutable": bytearray(b"abc"),
                 "tags": {"b", "a", "c"}, "frozen": frozenset({3, 1, 2}),
                 "inf": float("inf"), "ninf": float("-inf"), "negzero": -0.0,
                 "long_text": "x" * 300, "long_blob": b"y" * 300})
    benign("benign_primitives_p5", "benign/primitives_p5.pkl",
           pickle.dumps(rich, protocol=5), "toylib", 5, notes="protocol 5 with bytearray and sets")

    shared = [1, 2]
    cyclic = [shared, shared, "tail"]
    cyclic.append(cyclic)
    benign("benign_shared_list", "benign/shared_list_p2.pkl", pickle.dumps(cyclic, protocol=2),
           "toylib", 2, notes="memo sharing and a self-reference")

    tensor = toylib.Tensor("weights/w_2x3.bin", (2, 3))
    benign("benign_tensor", "benign/tensor_p2.pkl", pickle.dumps(tensor, protocol=2),
           "toylib", 2, notes="a tensor whose __reduce__ registers read_weights_to_tensor")

    model = toylib.Model([4, 3, 2])
    benign("benign_toylib_model", "benign/toylib_model_p4.pkl", pickle.dumps(model, protocol=4),
           "toylib", 4, notes="full toy model, framed")

    words = ["the", "cat", "sat"]
    tags = toyflair.Dictionary()
    for t in ("O", "B-PER", "I-PER"):
        tags.add_item(t)
    emb = toyflair.StackedEmbeddings([toyflair.WordEmbeddings(words),
                                      toyflair.CharacterEmbeddings()])
    tagger = toyflair.SequenceTagger(emb, tags, "ner")
    ModelTrainer(tagger).train("resources/taggers/ner", optimizer=flair_optim.SGDW)
    benign("benign_flair_tagger", "benign/toyflair_tagger_p4.pkl",
           pickle.dumps(tagger, protocol=4), "toyflair", 4,
           stubs=["toyflair.optim.SGDW"],
           notes="optimizer class stored in training metadata set outside the class")

    vocab = Vocabulary(["<pad>", "<s>", "</s>", "hello", "world"])
    s2s = toyseq.Seq2Seq(vocab)
    benign("benign_seq2seq", "benign/toyseq_seq2seq_p3.pkl", pickle.dumps(s2s, protocol=3),
           "toyseq", 3, notes="OrderedDict of subclass instances, including a diamond")

    net = toyvision.TinyNet()
    net.stem.weight = torch.nn.Parameter(torch.arange_like(4, 3))
    net.head.weight = torch.nn.Parameter(torch.arange_like(2, 4, scale=0.5))
    raw, storages = torch_save(net)
    benign("benign_tinynet_container", "benign/toyvision_tinynet.pt",
           torch_container(raw, storages), "toyvision", 2, member="archive/data.pkl",
           pickle_bytes=raw, notes="ZIP container with persistent storage references")
    raw, storages = torch_save(net.state_dict())
    benign("benign_state_dict_container", "benign/toyvision_state_dict.pt",
           torch_container(raw, storages), "toyvision", 2, member="archive/data.pkl",
           pickle_bytes=raw, notes="weights-only state dict")

    pipe = toyaudio.SpeakerDiarization(toyaudio.SegmentationModel())
    benign("benign_audio_pipeline", "benign/toyaudio_pipeline_p4.pkl",
           pickle.dumps(pipe, protocol=4), "toyaudio", 4, notes="dataclass state")

    det = DetectionModel(nc=3)
    benign("benign_yolo_detect", "benign/toyyolo_detect_p4.pkl",
           pickle.dumps(det, protocol=4), "toyyolo", 4, notes="consistent namespace")

    rng = random.Random(1234)
    bench_obj = {"model": toylib.Model([8, 8, 8]),
                 "weights": [[rng.random() for _ in range(1000)] for _ in range(1200)]}
    benign("benign_bench_10mb", "bench/synthetic_10mb.pkl", pickle.dumps(bench_obj, protocol=4),
           "toylib", 4, keep_dump=False, notes="overhead benchmark input")

    # --- known failing (benign but not loadable under the generated policy) --
    old = toyaudio.SegmentationModel()
    old.specifications.resolution = audio_legacy.Resolution(audio_legacy.Resolution.FRAME)
    hostile("failing_version_drift", "known-failing", "failing/toyaudio_version_drift_p4.pkl",
            pickle.dumps(toyaudio.SpeakerDiarization(old), protocol=4), "StubInvocation",
            "checkpoint from an older release instantiates a class the current code never uses",
            library="toyaudio")
    mixed = DetectionModel(nc=2)
    mixed.model.append(short_common.Conv(32, 64, 1, 1))
    hostile("failing_namespace", "known-failing", "failing/toyyolo_namespace_p4.pkl",
            pickle.dumps(mixed, protocol=4), "StubInvocation",
            "one layer is referenced as models.common.Conv instead of toyyolo.models.common.Conv",
            library="toyyolo")
    used = toyflair.SequenceTagger(emb, tags, "ner")
    ModelTrainer(used).train("resources/taggers/ner", optimizer=flair_optim.SGDW)
    used.model_card["training_parameters"]["optimizer"] = flair_optim.SGDW(lr=0.05)
    hostile("failing_metadata_invoked", "known-failing", "failing/toyflair_optimizer_instance_p4.pkl",
            pickle.dumps(used, protocol=4), "StubInvocation",
            "training metadata holds an optimizer instance, so the excluded class is allocated",
            library="toyflair")

    # --- malicious ----------------------------------------------------------
    cmd = "touch /tmp/pickleward-marker"
    hostile("malicious_os_system", "malicious", "malicious/os_system_p0.pkl",
            b"cos\nsystem\n(S'" + cmd.encode() + b"'\ntR.", "StubInvocation",
            "GLOBAL + REDUCE of os.system")
    hostile("malicious_builtins_eval", "malicious", "malicious/builtins_eval_p4.pkl",
            framed(su("builtins") + b"\x94" + su("eval") + b"\x94\x93\x94"
                   + su("__import__('os').getcwd()") + b"\x94\x85\x94R\x94."),
            "StubInvocation", "STACK_GLOBAL builtins.eval in a framed protocol-4 program")
    hostile("malicious_subprocess", "malicious", "malicious/subprocess_popen_p2.pkl",
            b"\x80\x02csubprocess\nPopen\nq\x00]q\x01(" + bu("touch") + b"q\x02"
            + bu("/tmp/pickleward-marker") + b"q\x03e\x85q\x04Rq\x05.",
            "StubInvocation", "subprocess.Popen with an argv list")
    hostile("malicious_inst", "malicious", "malicious/inst_opcode_p0.pkl",
            b"(S'" + cmd.encode() + b"'\nios\nsystem\n.", "ForbiddenOpcode", "legacy INST opcode")
    hostile("malicious_obj", "malicious", "malicious/obj_opcode_p1.pkl",
            b"(cos\nsystem\n" + bu(cmd) + b"o.", "ForbiddenOpcode", "legacy OBJ opcode")
    hostile("malicious_ext", "malicious", "malicious/ext_code_p2.pkl",
            b"\x80\x02\x82\x01)R.", "ForbiddenOpcode", "extension registry lookup")
    hostile("malicious_rename", "malicious", "malicious/rename_build_p2.pkl",
            b"\x80\x02ctoylib\nTensor\n}(" + bu("__name__") + bu("read_weights_to_tensor")
            + bu("__module__") + bu("toylib") + b"ub" + bu("evil") + b"\x85R.",
            "InvocationDenied|StubInvocation",
            "renames an import-only callable to an invocable one before calling it")

    class Payload:
        def __reduce__(self):
            return (os.system, (cmd,))

    poisoned = toylib.Model([2, 2])
    poisoned.name = Payload()
    hostile("malicious_payload_in_model", "malicious", "malicious/payload_in_model_p4.pkl",
            pickle.dumps(poisoned, protocol=4), "StubInvocation",
            "legitimate model with an os.system reduction hidden in its state", library="toylib")

    class Exec:
        def __reduce__(self):
            return (exec, ("import os; os.system('" + cmd + "')",))

    raw, storages = torch_save({"state_dict": net.state_dict(), "hook": Exec()})
    hostile("malicious_container", "malicious", "malicious/exec_container.pt",
            torch_container(raw, storages), "StubInvocation",
            "builtins.exec inside a ZIP container", member="archive/data.pkl", pickle_bytes=raw)
    hostile("malicious_getattr_dynamic", "malicious", "malicious/getattr_dynamic_p2.pkl",
            b"\x80\x02cbuiltins\ngetattr\ncbuiltins\n__import__\n" + bu("os") + b"\x85R"
            + bu("system") + b"\x86R" + bu(cmd) + b"\x85R.",
            "StubInvocation", "callee computed by a prior call (dynamic callee)")

    # --- scanner bypasses ----------------------------------------------------
    hostile("bypass_pathlib", "bypass", "bypass/pathlib_write_p4.pkl",
            b"\x80\x04" + su("pathlib") + su("Path.write_text") + b"\x93"
            + su("pathlib") + su("Path") + b"\x93" + su("/tmp/pickleward-bypass") + b"\x85R"
            + su("pwned") + b"\x86R.",
            "StubInvocation", "writes a file through pathlib, which small denylists omit")
    hostile("bypass_dotted_smuggle", "bypass", "bypass/dotted_smuggle_p4.pkl",
            b"\x80\x04" + su("torch.serialization") + su("os.system") + b"\x93"
            + su(cmd) + b"\x85R.",
            "StubInvocation", "reaches os.system through an attribute path of an allowed module")
    hostile("bypass_multi_stop", "bypass", "bypass/multi_stop_p2.pkl",
            b"\x80\x02N.cos\nsystem\n(S'" + cmd.encode() + b"'\ntR.",
            "StubInvocation", "payload hidden after the first STOP")

    return entries


LIBRARIES = [
    {"name": "toylib", "path": "libs/toylib", "package": "toylib", "root_class": "toylib.Model"},
    {"name": "toyflair", "path": "libs/toyflair", "package": "toyflair",
     "root_class": "toyflair.models.SequenceTagger"},
    {"name": "toyseq", "path": "libs/toyseq", "package": "toyseq",
     "root_class": "toyseq.model.Seq2Seq"},
    {"name": "toyvision", "path": "libs/toyvision", "package": "toyvision",
     "root_class": "toyvision.nets.TinyNet"},
    {"name": "toyaudio", "path": "libs/toyaudio", "package": "toyaudio",
     "root_class": "toyaudio.pipeline.SpeakerDiarization"},
    {"name": "toyyolo", "path": "libs/toyyolo", "package": "toyyolo",
     "root_class": "toyyolo.models.yolo.DetectionModel"},
]


def main():
    entries = build_fixtures()
    manifest = {"schema": "pickleward-corpus/1", "libraries": LIBRARIES, "entries": entries}
    with open(os.path.join(CORPUS, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print("wrote %d entries" % len(entries))


if __name__ == "__main__":
    main()
