"""Regenerate the network descriptors under fixtures/.

Each builder returns rows of
(name, kind, kx, ky, nif, nof, activations, input_from, has_pool, pool_kind)
where ``activations`` is the number of input activations of the layer
(H x W x Nif for a convolution at its input resolution).

    python tools/make_fixtures.py [--out fixtures]
"""
import argparse
import csv
import os

HEADER = ["name", "kind", "kx", "ky", "nif", "nof", "activations", "sparsity",
          "input_from", "has_pool", "pool_kind"]


def conv(name, k, nif, nof, hw, src=(), pool=None):
    return [name, "conv", k, k, nif, nof, hw * hw * nif, src, pool]


def fc(name, nif, nof, src=(), pool=None):
    return [name, "fc", 1, 1, nif, nof, nif, src, pool]


def resnet_cifar(blocks_per_stage=18, classes=10):
    """CIFAR ResNet (6n+2 layers) with parameter-free identity shortcuts."""
    rows = [conv("conv1", 3, 3, 16, 32)]
    prev_block_input = "conv1"
    c, hw = 16, 32
    for stage, width in enumerate((16, 32, 64)):
        for b in range(blocks_per_stage):
            a_name = f"s{stage + 1}b{b + 1}a"
            b_name = f"s{stage + 1}b{b + 1}b"
            rows.append(conv(a_name, 3, c, width, hw))
            if stage > 0 and b == 0:
                hw //= 2   # stride-2 first convolution
            rows.append(conv(b_name, 3, width, width, hw))
            c = width
            # the block output is b_name + shortcut from the block input
            rows.append(("skip", prev_block_input))
            prev_block_input = b_name
    rows.append(fc("fc", 64, classes))
    return _resolve_skips(rows, last_pool="avg")


def _resolve_skips(rows, last_pool=None):
    # a ("skip", src) marker attaches src to the input_from of the next real row
    out, pending = [], []
    for r in rows:
        if r[0] == "skip":
            pending.append(r[1])
            continue
        r = list(r)
        r[7] = tuple(r[7]) + tuple(pending)
        pending = []
        out.append(r)
    if last_pool:
        out[-2][8] = last_pool
    return out


def resnet50(classes=1000):
    # 7x7/2 convolution then 3x3/2 max pool -> 56x56
    rows = [conv("conv1", 7, 3, 64, 224, pool="max")]
    inp, hw = 64, 56
    prev_out = "conv1"
    for stage, (mid, out, n) in enumerate(((64, 256, 3), (128, 512, 4), (256, 1024, 6), (512, 2048, 3))):
        for b in range(n):
            p = f"s{stage + 2}b{b + 1}"
            block_in = prev_out
            rows.append(conv(p + "a", 1, inp, mid, hw))
            stride = 2 if (stage > 0 and b == 0) else 1
            rows.append(conv(p + "b", 3, mid, mid, hw))
            hw_out = hw // stride
            rows.append(conv(p + "c", 1, mid, out, hw_out))
            if b == 0:
                proj = conv(p + "proj", 1, inp, out, hw, src=(block_in,))
                rows.append(proj)
                rows.append(("skip", p + "c"))
                prev_out = p + "proj"
            else:
                rows.append(("skip", block_in))
                prev_out = p + "c"
            inp, hw = out, hw_out
    rows.append(fc("fc", 2048, classes))
    return _resolve_skips(rows, last_pool="avg")


def vgg(cfg, image, fc_dims, classes, pool_last=True):
    rows, c, hw, i = [], 3, image, 0
    for item in cfg:
        if item == "M":
            rows[-1][8] = "max"
            hw //= 2
            continue
        i += 1
        rows.append(conv(f"conv{i}", 3, c, item, hw))
        c = item
    if not pool_last and rows[-1][8] == "max":
        rows[-1][8] = None
        hw *= 2
    flat = hw * hw * c
    dims = [flat] + list(fc_dims) + [classes]
    for j in range(len(dims) - 1):
        rows.append(fc(f"fc{j + 1}", dims[j], dims[j + 1]))
    return [list(r[:7]) + [tuple(r[7]), r[8]] for r in rows]


def vgg16():
    cfg = [64, 64, "M", 128, 128, "M", 256, 256, 256, "M", 512, 512, 512, "M", 512, 512, 512, "M"]
    return vgg(cfg, 224, (4096, 4096), 1000)


def vgg19_cifar100():
    cfg = [64, 64, "M", 128, 128, "M", 256, 256, 256, 256, "M", 512, 512, 512, 512, "M",
           512, 512, 512, 512, "M"]
    return vgg(cfg, 32, (4096, 4096), 100, pool_last=False)


def lenet5():
    """LeNet-5 on 28x28 digits with same-padded 5x5 convolutions."""
    return [
        conv("conv1", 5, 1, 20, 28, pool="max"),
        conv("conv2", 5, 20, 50, 14, pool="max"),
        fc("fc1", 7 * 7 * 50, 500),
        fc("fc2", 500, 10),
    ]


def densenet_cifar(layers_per_block=36, growth=22, init=16, classes=10):
    """Non-bottleneck DenseNet: three dense blocks joined by 1x1 transitions."""
    rows = [conv("conv1", 3, 3, init, 32)]
    c, hw = init, 32
    block_input = "conv1"
    for blk in range(3):
        members = []
        for j in range(layers_per_block):
            name = f"d{blk + 1}l{j + 1}"
            # concatenation of the block input and every earlier layer of the block
            srcs = tuple(s for s in [block_input] + members[:-1] if rows[-1][0] != s)
            rows.append(conv(name, 3, c, growth, hw, src=srcs))
            members.append(name)
            c += growth
        if blk < 2:
            rows.append(conv(f"t{blk + 1}", 1, c, c, hw, src=tuple(members[:-1]) + (block_input,), pool="avg"))
            block_input = f"t{blk + 1}"
            hw //= 2
    rows.append(fc("fc", c, classes, src=tuple(members[:-1]) + (block_input,)))
    rows[-2][8] = "avg"
    return [list(r[:7]) + [tuple(r[7]), r[8]] for r in rows]


FIXTURES = {
    "resnet110_cifar10.csv": lambda: resnet_cifar(18, 10),
    "resnet50_imagenet.csv": resnet50,
    "vgg16_imagenet.csv": vgg16,
    "vgg19_cifar100.csv": vgg19_cifar100,
    "lenet5_mnist.csv": lenet5,
    "densenet110_cifar10.csv": densenet_cifar,
}


def write(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for name, kind, kx, ky, nif, nof, act, src, pool in rows:
            w.writerow([name, kind, kx, ky, nif, nof, act, "0.0", ";".join(src),
                        1 if pool else 0, pool or ""])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=os.path.join(os.path.dirname(__file__), "..", "fixtures"))
    args = ap.parse_args()
    os.makedirs(args.out, exist_ok=True)
    for fname, build in FIXTURES.items():
        rows = build()
        write(os.path.join(args.out, fname), rows)
        params = sum(r[2] * r[3] * r[4] * r[5] for r in rows)
        print(f"{fname}: {len(rows)} layers, {params / 1e6:.2f}M weights")


if __name__ == "__main__":
    main()
