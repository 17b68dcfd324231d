"""
Binary masks: RLE codec, boxes, IoU, square crops
=================================================

Walks a small mask through every maskops operation.
"""

import numpy as np

from viewmatch import maskops

# a 4x6 mask with one 2x3 blob
mask = np.zeros((4, 6), dtype=bool)
mask[1:3, 2:5] = True
print("mask:")
print(mask.astype(int))

# run-length encoding scans column-major: counts alternate background /
# foreground, starting with background
rle = maskops.rle_encode(mask)
print("rle size:", rle.size, "counts:", rle.counts)
back = maskops.rle_decode(rle)
print("decode(encode(mask)) identical:", bool(np.array_equal(back, mask)))

# the single-pixel corner case: pixel (0, 0) of a 2x2 mask encodes as
# zero background, one foreground, three background
corner = np.zeros((2, 2), dtype=bool)
corner[0, 0] = True
print("2x2 corner counts:", maskops.rle_encode(corner).counts)

# tight bounding box in (x, y, w, h) order
box = maskops.bbox_from_mask(mask)
print("bbox:", box)

# IoU against a shifted copy
shifted = np.zeros_like(mask)
shifted[1:3, 3:6] = True
print("IoU with shifted copy:", maskops.mask_iou(mask, shifted))

# square crop transforms describe how a box is scaled and padded into a
# fixed target side; content fills the long side, padding splits the rest
t = maskops.crop_square_transform(box, image_w=6, image_h=4, target=224)
print("crop transform:", t)
print("scaled content fits target:",
      max(round(box.w * t.scale), round(box.h * t.scale)) == 224)
