#!/usr/bin/env python3
"""Writes the synthetic evaluation fixture used by the acceptance suite.

Each pair has a latent quality q in [0, 1]. Reconstructions are derived from
their ground truth with q controlling how many objects survive, how close the
embeddings stay and how much the pixels are disturbed; human ratings follow q
with per-evaluator bias and noise. Output is fully determined by --seed.
"""

import argparse
import json
import math
import random
import struct
import zlib
from pathlib import Path

PAIRS = 24
EVALUATORS = 6
SIZE = 32
FEATURE_TAGS = {"alexnet2": 24, "alexnet5": 24, "inception": 32, "clip": 32, "effnet": 48, "swav": 48}
CAPTION_DIM = 16


def png_bytes(width, height, rgb):
    def chunk(tag, data):
        return struct.pack(">I", len(data)) + tag + data + struct.pack(">I", zlib.crc32(tag + data) & 0xFFFFFFFF)

    raw = b"".join(b"\x00" + bytes(rgb[y * width * 3:(y + 1) * width * 3]) for y in range(height))
    header = struct.pack(">IIBBBBB", width, height, 8, 2, 0, 0, 0)
    return b"\x89PNG\r\n\x1a\n" + chunk(b"IHDR", header) + chunk(b"IDAT", zlib.compress(raw, 9)) + chunk(b"IEND", b"")


def gt_image(rng):
    fx, fy = rng.uniform(0.1, 0.5), rng.uniform(0.1, 0.5)
    base = [rng.randint(40, 200) for _ in range(3)]
    px = []
    for y in range(SIZE):
        for x in range(SIZE):
            for c in range(3):
                v = base[c] + 50 * math.sin(fx * x + c) + 50 * math.cos(fy * y - c)
                px.append(max(0, min(255, int(round(v)))))
    return px


def recon_image(rng, gt, q):
    noise = 90 * (1 - q)
    return [max(0, min(255, int(round(q * v + (1 - q) * 128 + rng.gauss(0, noise))))) for v in gt]


def vector(rng, dim):
    return [rng.gauss(0, 1) for _ in range(dim)]


def perturb(rng, v, q):
    spread = 1.5 * (1 - q) + 0.05
    return [q * a + rng.gauss(0, spread) for a in v]


def rounded(v):
    return [round(a, 4) for a in v]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", required=True)
    ap.add_argument("--vocab", required=True, help="categories.json")
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    rng = random.Random(args.seed)
    vocab = json.loads(Path(args.vocab).read_text())
    salient, inconspicuous = vocab["salient"], vocab["inconspicuous"]
    supercat = vocab["supercategories"]
    by_super = {}
    for c, s in supercat.items():
        by_super.setdefault(s, []).append(c)

    out = Path(args.out)
    (out / "images").mkdir(parents=True, exist_ok=True)
    ids = [f"syn{i + 1:02d}" for i in range(PAIRS)]
    quality = {i: round(rng.uniform(0.05, 0.95), 3) for i in ids}

    det_lines, emb_lines, cap_lines, manifest = [], [], [], {}
    for n, image_id in enumerate(ids):
        q = quality[image_id]
        cats = rng.sample(salient, rng.randint(1, 3)) + rng.sample(inconspicuous, rng.randint(0, 2))
        gt = []
        for c in cats:
            w, h = round(rng.uniform(0.1, 0.6), 3), round(rng.uniform(0.1, 0.6), 3)
            x, y = round(rng.uniform(0, 1 - w), 3), round(rng.uniform(0, 1 - h), 3)
            gt.append({"category": c, "confidence": round(rng.uniform(0.3, 0.99), 3), "bbox": [x, y, w, h]})
        recon = []
        if n != PAIRS - 1:  # the last pair has an empty reconstruction side
            for d in gt:
                r = rng.random()
                if r < q:
                    c = d["category"]
                elif r < q + (1 - q) / 2:
                    siblings = [s for s in by_super[supercat[d["category"]]] if s != d["category"]]
                    c = rng.choice(siblings) if siblings else rng.choice(salient)
                else:
                    continue
                conf = round(min(0.99, max(0.05, d["confidence"] + rng.uniform(-0.3, 0.1))), 3)
                recon.append({"category": c, "confidence": conf, "bbox": d["bbox"]})
            if rng.random() > q:
                recon.append({"category": rng.choice(inconspicuous), "confidence": round(rng.uniform(0.1, 0.6), 3),
                              "bbox": [0.1, 0.1, 0.2, 0.2]})
        det_lines.append({"image_id": image_id, "role": "gt", "detections": gt})
        det_lines.append({"image_id": image_id, "role": "recon", "detections": recon})

        cap = vector(rng, CAPTION_DIM)
        emb_lines.append({"image_id": image_id, "role": "gt", "kind": "caption_text", "model_tag": "caption-embed",
                          "vector": rounded(cap)})
        emb_lines.append({"image_id": image_id, "role": "recon", "kind": "caption_text", "model_tag": "caption-embed",
                          "vector": rounded(perturb(rng, cap, q))})
        for tag, dim in FEATURE_TAGS.items():
            f = vector(rng, dim)
            emb_lines.append({"image_id": image_id, "role": "gt", "kind": "image_feature", "model_tag": tag,
                              "vector": rounded(f)})
            emb_lines.append({"image_id": image_id, "role": "recon", "kind": "image_feature", "model_tag": tag,
                              "vector": rounded(perturb(rng, f, q))})

        names = [d["category"] for d in gt]
        rnames = [d["category"] for d in recon] or ["something blurry"]
        cap_lines.append({"image_id": image_id, "role": "gt", "caption": "a photo of " + " and ".join(names)})
        cap_lines.append({"image_id": image_id, "role": "recon", "caption": "a picture of " + " and ".join(rnames)})

        g = gt_image(rng)
        r = recon_image(rng, g, q)
        (out / "images" / f"{image_id}_gt.png").write_bytes(png_bytes(SIZE, SIZE, g))
        (out / "images" / f"{image_id}_recon.png").write_bytes(png_bytes(SIZE, SIZE, r))
        manifest[image_id] = {"gt_image": f"images/{image_id}_gt.png", "recon_image": f"images/{image_id}_recon.png"}

    def jsonl(path, rows):
        path.write_text("".join(json.dumps(row, separators=(",", ":")) + "\n" for row in rows))

    jsonl(out / "detections.jsonl", det_lines)
    jsonl(out / "embeddings.jsonl", emb_lines)
    jsonl(out / "captions.jsonl", cap_lines)
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")

    rows = ["evaluator_id,image_id,semantic,perceptual"]
    for e in range(EVALUATORS):
        bias = rng.uniform(-0.6, 0.6)
        for image_id in ids:
            q = quality[image_id]
            sem = max(1, min(5, round(1 + 4 * q + bias + rng.gauss(0, 0.6))))
            per = max(1, min(5, round(1 + 4 * q + bias + rng.gauss(0, 0.9))))
            rows.append(f"E{e + 1},{image_id},{sem},{per}")
    (out / "ratings.csv").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
