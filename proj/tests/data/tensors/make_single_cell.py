"""Writes frame_0000.tens: YOLOv5s heads at target size 64, 80 classes.

Objectness logits are -100 everywhere except layer 0, anchor 0, cell
(gx=3, gy=2), where objectness and class 0 are +100 and the box logits are 0.
With anchor (10,13) that cell decodes to the box (23, 13.5, 33, 26.5).
"""
import struct

TARGET = 64
STRIDES = (8, 16, 32)
ANCHORS = 3
CHANNELS = 85

with open("frame_0000.tens", "wb") as f:
    f.write(f"TENSV1 {len(STRIDES)}\n".encode())
    for layer, stride in enumerate(STRIDES):
        g = TARGET // stride
        f.write(f"{layer} {stride} {ANCHORS} {g} {g} {CHANNELS}\n".encode())
        values = []
        for a in range(ANCHORS):
            for gy in range(g):
                for gx in range(g):
                    cell = [0.0] * CHANNELS
                    cell[4] = -100.0
                    if (layer, a, gx, gy) == (0, 0, 3, 2):
                        cell[4] = 100.0
                        cell[5] = 100.0
                    values += cell
        f.write(struct.pack(f"<{len(values)}f", *values))
