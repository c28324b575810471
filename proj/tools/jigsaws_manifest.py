#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Build a zeal dataset manifest from a JIGSAWS checkout.

The JIGSAWS videos are not redistributable, so the pipeline never bundles
them; this script turns a local copy into the manifest + fold files the
`zeal` binary consumes. It needs two inputs:

  * per-trial frame directories (PNG frames, lexicographically ordered), and
  * the meta files shipped with JIGSAWS (one row per trial, whitespace
    separated, with the summed global rating in one column).

Frames can be produced from the .avi files with --extract-videos, which
shells out to ffmpeg:

  jigsaws_manifest.py \
      --meta JIGSAWS/Suturing/meta_file_Suturing.txt \
      --meta JIGSAWS/Knot_Tying/meta_file_Knot_Tying.txt \
      --extract-videos JIGSAWS --frames-root frames \
      --out dataset/manifest.json --folds dataset/folds.json

Without --extract-videos the frame directories must already exist under
--frames-root, named after the trial ids (e.g. frames/Suturing_B001/).

The fold file rotates each task's sorted trials through four contiguous
blocks: fold f tests block f, validates block (f+1) mod 4, and trains on the
rest, so every task appears in every fold's test split. The same rotation is
what the binary generates when a manifest carries no fold file; emitting it
here just makes the split explicit and versionable.
"""

import argparse
import json
import os
import shutil
import subprocess
import sys
from pathlib import Path

TASKS = {
    "Suturing": "SU",
    "Needle_Passing": "NP",
    "Knot_Tying": "KT",
}

GRS_MIN, GRS_MAX = 6, 30
FOLD_COUNT = 4


def task_of(trial_id):
    for prefix, code in TASKS.items():
        if trial_id.startswith(prefix + "_"):
            return prefix, code
    raise SystemExit(
        f"error: trial '{trial_id}' does not start with one of "
        f"{', '.join(TASKS)}"
    )


def parse_meta(path, grs_column):
    """Yield (trial_id, grs) rows from one JIGSAWS meta file."""
    rows = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        fields = line.split()
        if not fields:
            continue
        if len(fields) <= grs_column:
            raise SystemExit(
                f"error: {path}:{lineno}: only {len(fields)} columns, "
                f"--grs-column is {grs_column}"
            )
        trial_id = fields[0]
        try:
            grs = int(fields[grs_column])
        except ValueError:
            raise SystemExit(
                f"error: {path}:{lineno}: column {grs_column} "
                f"('{fields[grs_column]}') is not an integer; pass the "
                f"column index of the summed rating via --grs-column"
            )
        if not GRS_MIN <= grs <= GRS_MAX:
            raise SystemExit(
                f"error: {path}:{lineno}: grs {grs} for '{trial_id}' is "
                f"outside [{GRS_MIN}, {GRS_MAX}]; is --grs-column right?"
            )
        rows.append((trial_id, grs))
    if not rows:
        raise SystemExit(f"error: {path}: no trials parsed")
    return rows


def extract_frames(videos_root, trial_id, task_dir, capture, frames_root, fps):
    """Extract one trial's frames with ffmpeg; returns the frame directory."""
    video = videos_root / task_dir / "video" / f"{trial_id}_{capture}.avi"
    if not video.exists():
        raise SystemExit(f"error: video not found: {video}")
    out_dir = frames_root / trial_id
    out_dir.mkdir(parents=True, exist_ok=True)
    cmd = ["ffmpeg", "-nostdin", "-loglevel", "error", "-i", str(video)]
    if fps:
        cmd += ["-vf", f"fps={fps}"]
    cmd += ["-start_number", "0", str(out_dir / "frame_%06d.png")]
    subprocess.run(cmd, check=True)
    return out_dir


def rotation_folds(ids_by_task):
    """Per-task sorted rotation into 4 blocks, concatenated across tasks."""
    folds = [{"train": [], "val": [], "test": []} for _ in range(FOLD_COUNT)]
    for task in sorted(ids_by_task):
        ids = sorted(ids_by_task[task])
        n = len(ids)
        if n < FOLD_COUNT:
            raise SystemExit(
                f"error: task {task} has {n} trials; need at least "
                f"{FOLD_COUNT} for rotation folds"
            )
        blocks, pos = [], 0
        for b in range(FOLD_COUNT):
            length = n // FOLD_COUNT + (1 if b < n % FOLD_COUNT else 0)
            blocks.append(ids[pos : pos + length])
            pos += length
        for f in range(FOLD_COUNT):
            folds[f]["test"] += blocks[f]
            folds[f]["val"] += blocks[(f + 1) % FOLD_COUNT]
            for b in range(FOLD_COUNT):
                if b not in (f, (f + 1) % FOLD_COUNT):
                    folds[f]["train"] += blocks[b]
    return {"folds": folds}


def main():
    ap = argparse.ArgumentParser(
        description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter
    )
    ap.add_argument(
        "--meta",
        action="append",
        required=True,
        type=Path,
        help="JIGSAWS meta file; repeat once per task",
    )
    ap.add_argument(
        "--grs-column",
        type=int,
        default=2,
        help="0-based column of the summed global rating (default: 2)",
    )
    ap.add_argument(
        "--frames-root",
        required=True,
        type=Path,
        help="directory holding (or receiving) per-trial frame directories",
    )
    ap.add_argument(
        "--extract-videos",
        type=Path,
        help="JIGSAWS root with <Task>/video/<trial>_<capture>.avi; extract "
        "frames into --frames-root via ffmpeg",
    )
    ap.add_argument(
        "--capture",
        default="capture1",
        help="camera suffix used with --extract-videos (default: capture1)",
    )
    ap.add_argument(
        "--fps", type=float, default=None, help="downsample rate for extraction"
    )
    ap.add_argument(
        "--skip-missing",
        action="store_true",
        help="drop trials without a frame directory instead of failing",
    )
    ap.add_argument("--out", required=True, type=Path, help="manifest to write")
    ap.add_argument(
        "--folds", type=Path, help="also write a 4-fold rotation spec here"
    )
    args = ap.parse_args()

    if args.extract_videos and shutil.which("ffmpeg") is None:
        raise SystemExit("error: --extract-videos needs ffmpeg on PATH")

    trials = []
    seen = set()
    for meta in args.meta:
        for trial_id, grs in parse_meta(meta, args.grs_column):
            if trial_id in seen:
                raise SystemExit(f"error: duplicate trial id '{trial_id}'")
            seen.add(trial_id)
            task_dir, task_code = task_of(trial_id)
            trials.append((trial_id, task_dir, task_code, grs))
    trials.sort()

    args.frames_root.mkdir(parents=True, exist_ok=True)
    kept, missing = [], []
    for trial_id, task_dir, task_code, grs in trials:
        frame_dir = args.frames_root / trial_id
        if args.extract_videos and not any(frame_dir.glob("*.png")):
            extract_frames(
                args.extract_videos,
                trial_id,
                task_dir,
                args.capture,
                args.frames_root,
                args.fps,
            )
        if not any(frame_dir.glob("*.png")):
            missing.append(trial_id)
            continue
        kept.append((trial_id, task_code, grs))
    if missing and not args.skip_missing:
        raise SystemExit(
            "error: no frames for "
            + ", ".join(missing)
            + " (extract them or pass --skip-missing)"
        )
    for trial_id in missing:
        print(f"warning: skipping {trial_id}: no frames", file=sys.stderr)
    if not kept:
        raise SystemExit("error: no trials with frames; nothing to write")

    args.out.parent.mkdir(parents=True, exist_ok=True)
    manifest_dir = args.out.parent.resolve()
    frames_root = args.frames_root.resolve()
    try:
        root = os.path.relpath(frames_root, manifest_dir)
    except ValueError:  # e.g. different drives
        root = str(frames_root)

    manifest = {
        "root": root,
        "videos": [
            {"id": trial_id, "path": trial_id, "task": task_code, "grs": grs}
            for trial_id, task_code, grs in kept
        ],
    }

    if args.folds:
        ids_by_task = {}
        for trial_id, task_code, _ in kept:
            ids_by_task.setdefault(task_code, []).append(trial_id)
        args.folds.parent.mkdir(parents=True, exist_ok=True)
        args.folds.write_text(json.dumps(rotation_folds(ids_by_task), indent=2) + "\n")
        folds_path = args.folds.resolve()
        try:
            manifest["folds"] = os.path.relpath(folds_path, manifest_dir)
        except ValueError:
            manifest["folds"] = str(folds_path)

    args.out.write_text(json.dumps(manifest, indent=2) + "\n")
    by_task = {}
    for _, task_code, _ in kept:
        by_task[task_code] = by_task.get(task_code, 0) + 1
    counts = ", ".join(f"{t}={n}" for t, n in sorted(by_task.items()))
    print(f"wrote {args.out} ({len(kept)} trials: {counts})")


if __name__ == "__main__":
    main()
