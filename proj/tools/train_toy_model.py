#!/usr/bin/env python3
# Copyright 2026 The scsim Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Trains the toy conv net shipped in data/ and writes the evaluation subset.

Not needed to build or test the C++ code; kept so the shipped weights can be
regenerated. Needs torch and numpy.

    python3 tools/train_toy_model.py --csv mnist_5k.csv.gz --out data

Input CSV: 784 pixel columns (0..255) followed by the label, one image per row.
The split is stratified: 400 training and 100 evaluation images per class.
"""

import argparse
import gzip
import json
import pathlib
import struct

import numpy as np
import torch
import torch.nn.functional as F

FAN_IN = 25


def load_csv(path):
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rt") as f:
        rows = np.loadtxt(f, delimiter=",", dtype=np.float32)
    return rows[:, :-1].reshape(-1, 1, 28, 28) / 255.0, rows[:, -1].astype(np.int64)


def split(images, labels, per_class_eval, rng):
    train, held = [], []
    for c in range(10):
        idx = rng.permutation(np.flatnonzero(labels == c))
        held.extend(idx[:per_class_eval])
        train.extend(idx[per_class_eval:])
    train = rng.permutation(np.array(train))
    held = rng.permutation(np.array(held))
    return train, held


def ste_quant(x, n_bits):
    """Signed n-bit grid over [-1, 1), straight-through gradient."""
    half = 2.0 ** (n_bits - 1)
    q = torch.clamp(torch.sign(x) * torch.floor(torch.abs(x) * half + 0.5), -half, half - 1) / half
    return x + (q - x).detach()


def decode_noise(v, k):
    """Spread of a bipolar value decoded from k Bernoulli cycles."""
    return torch.sqrt((1 - v.detach() ** 2).clamp(min=0) / k) * torch.randn_like(v)


def fc_cycles(a, w, k):
    """Bit-level value of every 25-input FC group over k cycles.

    Multiplier i of every group reads the same activation and weight words, so
    streams at one tap are comonotone in their values; the B2S threshold of a
    group position is shared by all outputs.
    """
    b, slots = a.shape
    g = slots // FAN_IN
    pa = ((a.detach() + 1) / 2).view(b, 1, g, FAN_IN, 1)
    pw = ((w.detach() + 1) / 2).view(1, w.shape[0], g, FAN_IN, 1)
    ua = torch.rand(b, 1, 1, FAN_IN, k)
    uw = torch.rand(b, 1, 1, FAN_IN, k)
    prod = (pa > ua) == (pw > uw)
    count = prod.sum(3, dtype=torch.int16)  # b, out, g, k
    r = torch.randint(0, 2 * FAN_IN, (b, 1, g, k), dtype=torch.int16)
    return 2 * (2 * count > r).float().mean(-1) - 1


class ToyNet(torch.nn.Module):
    """Conv(5x5, no bias) -> ReLU -> MaxPool -> FC with bias.

    forward(k=None) follows the fixed-point datapath. With k set it emulates the
    stochastic one: per-cycle APC counts spread around their mean before the
    correlated ReLU/max-pool OR, and every 25-input group output is decoded
    from k B2S cycles.
    """

    def __init__(self, channels, pool, cycles):
        super().__init__()
        self.pool = pool
        self.cycles = cycles
        self.conv = torch.nn.Parameter(torch.empty(channels, 1, 5, 5).uniform_(-0.6, 0.6))
        feat = channels * (24 // pool) ** 2
        self.fc = torch.nn.Parameter(torch.empty(10, feat).uniform_(-0.2, 0.2))
        self.bias = torch.nn.Parameter(torch.zeros(10))

    def forward(self, x, n_bits, exp1, k=None):
        x = ste_quant(2 * x - 1, n_bits)
        w1 = ste_quant(self.conv, n_bits)
        y = F.conv2d(x, w1) / FAN_IN
        if k is None or self.cycles == 0:
            y = F.max_pool2d(F.relu(y), self.pool)
            if k is not None:
                y = y + decode_noise(y, k)
        else:
            var = (FAN_IN - F.conv2d(x.detach() ** 2, w1.detach() ** 2)).clamp(min=0) / FAN_IN ** 2
            s = y.unsqueeze(0) + var.sqrt().unsqueeze(0) * torch.randn((self.cycles,) + y.shape)
            s = s.clamp(-1, 1).flatten(0, 1)
            y = F.max_pool2d(F.relu(s), self.pool).unflatten(0, (self.cycles, -1)).mean(0)
            y = y + decode_noise(y, k)
        a = ste_quant(torch.clamp(y * 2.0 ** exp1, -1, 1), n_bits).flatten(1)

        w2 = ste_quant(self.fc, n_bits)
        b2 = ste_quant(self.bias, n_bits)
        if k is None:
            return (a @ w2.t() + b2) / FAN_IN
        n = a.shape[1] + 1
        slots = -(-n // FAN_IN) * FAN_IN
        a_ext = F.pad(torch.cat([a, torch.ones(a.shape[0], 1)], 1), (0, slots - n))
        w_ext = F.pad(torch.cat([w2, b2.unsqueeze(1)], 1), (0, slots - n))
        groups = torch.einsum("bgi,ogi->bog", a_ext.unflatten(1, (-1, FAN_IN)),
                              w_ext.unflatten(1, (-1, FAN_IN))) / FAN_IN
        return (groups + (fc_cycles(a_ext, w_ext, k) - groups).detach()).sum(2)

    def clamp_(self):
        with torch.no_grad():
            for p in (self.conv, self.fc, self.bias):
                p.clamp_(-1, 1 - 2.0 ** -11)


def write_idx(out, images, labels):
    n = len(labels)
    with open(out / "mnist-eval-images-idx3-ubyte", "wb") as f:
        f.write(struct.pack(">IIII", 0x803, n, 28, 28))
        f.write(np.round(images.reshape(n, -1) * 255).astype(np.uint8).tobytes())
    with open(out / "mnist-eval-labels-idx1-ubyte", "wb") as f:
        f.write(struct.pack(">II", 0x801, n))
        f.write(labels.astype(np.uint8).tobytes())


def fixed_array(values, bits):
    half = 2 ** (bits - 1)
    q = np.clip(np.sign(values) * np.floor(np.abs(values) * half + 0.5), -half, half - 1)
    return {"exp": bits - 1, "values": [int(v) for v in q.ravel()]}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--csv", required=True)
    ap.add_argument("--out", default="data")
    ap.add_argument("--channels", type=int, default=6)
    ap.add_argument("--pool", type=int, default=4)
    ap.add_argument("--exp1", type=int, default=1)
    ap.add_argument("--epochs", type=int, default=60)
    ap.add_argument("--noise-k", type=int, default=32)
    ap.add_argument("--cycles", type=int, default=8, help="per-cycle samples; 0 disables")
    ap.add_argument("--noisy-weight", type=float, default=1.0)
    ap.add_argument("--temperature", type=float, default=32.0)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--storage-bits", type=int, default=12)
    args = ap.parse_args()

    torch.manual_seed(args.seed)
    rng = np.random.default_rng(args.seed)
    images, labels = load_csv(args.csv)
    tr, ev = split(images, labels, 100, rng)
    xtr, ytr = torch.tensor(images[tr]), torch.tensor(labels[tr])
    xev, yev = torch.tensor(images[ev]), torch.tensor(labels[ev])

    net = ToyNet(args.channels, args.pool, args.cycles)
    opt = torch.optim.Adam(net.parameters(), lr=3e-3)
    sched = torch.optim.lr_scheduler.CosineAnnealingLR(opt, args.epochs)
    for epoch in range(args.epochs):
        perm = torch.randperm(len(ytr))
        for i in range(0, len(perm), 64):
            b = perm[i:i + 64]
            t = args.temperature
            loss = F.cross_entropy(net(xtr[b], 8, args.exp1) * t, ytr[b]) + args.noisy_weight * \
                F.cross_entropy(net(xtr[b], 8, args.exp1, k=args.noise_k) * t, ytr[b])
            opt.zero_grad()
            loss.backward()
            opt.step()
            net.clamp_()
        sched.step()
        if epoch % 10 == 9 or epoch == args.epochs - 1:
            with torch.no_grad():
                acc = (net(xev, 8, args.exp1).argmax(1) == yev).float().mean().item()
                noisy = (net(xev, 8, args.exp1, k=128).argmax(1) == yev).float().mean().item()
            print(f"epoch {epoch + 1}: loss {loss.item():.3f} eval {acc:.4f} noisy(k=128) {noisy:.4f}")

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    sb = args.storage_bits
    model = {
        "format": "scsim-model",
        "version": 1,
        "input": {"channels": 1, "height": 28, "width": 28},
        "input_map": "bipolar",
        "layers": [
            {"type": "conv", "out_channels": args.channels, "kernel": [5, 5], "stride": 1,
             "rescale_exp": args.exp1, "weights": fixed_array(net.conv.detach().numpy(), sb), "bias": None},
            {"type": "relu"},
            {"type": "maxpool", "window": args.pool},
            {"type": "fc", "out_features": 10, "rescale_exp": 0,
             "weights": fixed_array(net.fc.detach().numpy(), sb),
             "bias": fixed_array(net.bias.detach().numpy(), sb)},
        ],
    }
    (out / "toy_model.json").write_text(json.dumps(model, indent=1) + "\n")
    write_idx(out, images[ev], labels[ev])
    print(f"wrote {out / 'toy_model.json'} and {len(ev)} evaluation images")


if __name__ == "__main__":
    main()
