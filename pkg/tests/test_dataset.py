import json
import logging
import math

import numpy as np
import pytest

import helpers
from rgbdwarp import (
    CalibrationError,
    IngestConfig,
    PerturbationRanges,
    Pose,
    RenderConfig,
    SequenceError,
    gen_paired,
    gen_unpaired,
    imgio,
    load_sequence,
    parse_intrinsics,
    perturbation_pose,
    pose_from_raw34,
    read_manifest,
    relative_pose,
    reproject,
    write_manifest,
)

PAIR_KEYS = {
    "pair_id", "sequence_id", "source_frame_index", "target_frame_index",
    "relative_pose", "source_reprojected_image", "target_real_image",
    "mask_image", "splat_radius",
}
UNPAIRED_KEYS = {
    "item_id", "sequence_id", "frame_index", "perturbation",
    "source_image", "target_image", "mask_image",
    "yaw_deg", "pitch_deg", "roll_deg", "tx_m", "ty_m", "tz_m",
}


class TestParseIntrinsics:
    def test_literal_fixture(self, tmp_path):
        path = tmp_path / "intrinsics.txt"
        path.write_text("100 0 50\n0 100 50\n0 0 1\n")
        k = parse_intrinsics(path, 200, 100)
        assert (k.fx, k.fy, k.cx, k.cy) == (100.0, 100.0, 50.0, 50.0)
        assert (k.width, k.height) == (200, 100)

    def test_missing_file(self, tmp_path):
        with pytest.raises(CalibrationError):
            parse_intrinsics(tmp_path / "nope.txt", 10, 10)

    def test_wrong_count(self, tmp_path):
        path = tmp_path / "intrinsics.txt"
        path.write_text("1 2 3 4")
        with pytest.raises(CalibrationError):
            parse_intrinsics(path, 10, 10)

    def test_bad_token(self, tmp_path):
        path = tmp_path / "intrinsics.txt"
        path.write_text("a 0 5\n0 10 5\n0 0 1\n")
        with pytest.raises(CalibrationError):
            parse_intrinsics(path, 10, 10)

    def test_invalid_values(self, tmp_path):
        path = tmp_path / "intrinsics.txt"
        path.write_text("-5 0 5\n0 10 5\n0 0 1\n")
        with pytest.raises(CalibrationError):
            parse_intrinsics(path, 10, 10)


class TestPoseFromRaw:
    def test_exact_rotation_passes_through(self):
        m = np.hstack([np.eye(3), np.array([[1.0], [2.0], [3.0]])])
        pose = pose_from_raw34(m.ravel())
        assert np.array_equal(pose.rotation, np.eye(3))
        assert pose.translation.tolist() == [1.0, 2.0, 3.0]

    def test_slightly_noisy_rotation_is_snapped(self, rng):
        from test_geometry import random_rotation

        r = random_rotation(rng) + rng.normal(scale=1e-5, size=(3, 3))
        pose = pose_from_raw34(np.hstack([r, np.zeros((3, 1))]).ravel())
        err = np.abs(pose.rotation.T @ pose.rotation - np.eye(3)).max()
        assert err < 1e-12
        assert np.allclose(pose.rotation, r, atol=1e-4)

    def test_rejects_badly_scaled_rotation(self):
        m = np.hstack([np.eye(3) * 1.01, np.zeros((3, 1))])
        with pytest.raises(CalibrationError):
            pose_from_raw34(m.ravel())

    def test_rejects_reflection(self):
        m = np.hstack([np.diag([1.0, 1.0, -1.0]), np.zeros((3, 1))])
        with pytest.raises(CalibrationError):
            pose_from_raw34(m.ravel())

    def test_rejects_wrong_count(self):
        with pytest.raises(CalibrationError):
            pose_from_raw34([1.0] * 11)

    def test_rejects_non_finite(self):
        m = np.hstack([np.eye(3), np.full((3, 1), np.nan)])
        with pytest.raises(CalibrationError):
            pose_from_raw34(m.ravel())


class TestLoadSequence:
    def test_happy_path(self, sequence_dir):
        seq = load_sequence(sequence_dir)
        assert seq.id == "seq_a"
        assert len(seq) == 8
        assert seq.intrinsics.width == 48 and seq.intrinsics.height == 36
        frame = seq.load_frame(0)
        assert frame.color.shape == (36, 48, 3)
        assert frame.depth.shape == (36, 48)
        assert (frame.depth[frame.depth > 0] > 1.0).all()

    def test_poses_match_written_values(self, tmp_path):
        root = tmp_path / "s"
        _, poses = helpers.write_sequence(root, n_frames=5, yaw_step_deg=2.0)
        seq = load_sequence(root)
        for ref, expected in zip(seq.frames, poses):
            assert np.allclose(ref.pose.rotation, expected.rotation, atol=1e-9)
            assert np.allclose(ref.pose.translation, expected.translation, atol=1e-12)

    def test_custom_sequence_id(self, sequence_dir):
        assert load_sequence(sequence_dir, sequence_id="override").id == "override"

    def test_missing_directory(self, tmp_path):
        with pytest.raises(SequenceError):
            load_sequence(tmp_path / "absent")

    def test_missing_image_dirs(self, tmp_path):
        (tmp_path / "s").mkdir()
        with pytest.raises(SequenceError):
            load_sequence(tmp_path / "s")

    def test_frame_count_mismatch(self, sequence_dir):
        extra = sequence_dir / "color" / "9999.png"
        imgio.save_color(np.zeros((36, 48, 3), np.uint8), extra)
        with pytest.raises(SequenceError):
            load_sequence(sequence_dir)

    def test_missing_intrinsics(self, sequence_dir):
        (sequence_dir / "intrinsics.txt").unlink()
        with pytest.raises(CalibrationError):
            load_sequence(sequence_dir)

    def test_missing_extrinsics(self, sequence_dir):
        (sequence_dir / "extrinsics.txt").unlink()
        with pytest.raises(CalibrationError):
            load_sequence(sequence_dir)

    def test_wrong_extrinsics_count(self, sequence_dir):
        text = (sequence_dir / "extrinsics.txt").read_text().split()
        (sequence_dir / "extrinsics.txt").write_text(" ".join(text[:-1]))
        with pytest.raises(CalibrationError):
            load_sequence(sequence_dir)

    def test_corrupt_rotation(self, sequence_dir):
        values = (sequence_dir / "extrinsics.txt").read_text().split()
        values[0] = "9.9"
        (sequence_dir / "extrinsics.txt").write_text(" ".join(values))
        with pytest.raises(CalibrationError):
            load_sequence(sequence_dir)

    def test_rejects_bad_ingest_encoding(self):
        with pytest.raises(ValueError):
            IngestConfig(depth_encoding="leagues")

    def test_sun3d_depth_decoding(self, tmp_path):
        root = tmp_path / "s"
        (root / "color").mkdir(parents=True)
        (root / "depth").mkdir()
        imgio.save_color(np.zeros((4, 6, 3), np.uint8), root / "color" / "0000.png")
        mm = np.full((4, 6), 1500, np.int64)
        raw = (((mm << 3) | (mm >> 13)) % 65536).astype(np.uint16)
        from PIL import Image

        Image.fromarray(raw).save(root / "depth" / "0000.png")
        (root / "intrinsics.txt").write_text("5 0 3\n0 5 2\n0 0 1\n")
        (root / "extrinsics.txt").write_text("1 0 0 0  0 1 0 0  0 0 1 0\n")
        seq = load_sequence(root, IngestConfig(depth_encoding="sun3d"))
        assert (seq.load_frame(0).depth == 1.5).all()


class TestGenPaired:
    def test_contract(self, tmp_path, sequence_dir):
        out = tmp_path / "data"
        seq = load_sequence(sequence_dir)
        records = gen_paired(seq, out, 6, max_gap=4, seed=0)
        assert len(records) == 6
        manifest_path = out / "manifest.jsonl"
        write_manifest(records, manifest_path)
        rows = read_manifest(manifest_path)
        assert len(rows) == 6
        seen = set()
        for row in rows:
            assert set(row) == PAIR_KEYS
            a, b = row["source_frame_index"], row["target_frame_index"]
            assert 1 <= b - a <= 4
            assert (a, b) not in seen
            seen.add((a, b))
            assert row["splat_radius"] == 1
            for key in ("source_reprojected_image", "target_real_image", "mask_image"):
                assert (out / row[key]).is_file()
            assert len(row["relative_pose"]) == 12

    def test_relative_pose_recomputes_from_sequence(self, tmp_path):
        root = tmp_path / "s"
        helpers.write_sequence(root, n_frames=6, yaw_step_deg=1.5, seed=2)
        seq = load_sequence(root)
        records = gen_paired(seq, tmp_path / "d", 5, max_gap=3, seed=1)
        write_manifest(records, tmp_path / "d" / "manifest.jsonl")
        for row in read_manifest(tmp_path / "d" / "manifest.jsonl"):
            expected = relative_pose(
                seq.frames[row["source_frame_index"]].pose,
                seq.frames[row["target_frame_index"]].pose,
            ).matrix34().ravel()
            assert np.abs(np.array(row["relative_pose"]) - expected).max() < 1e-9

    def test_source_image_matches_direct_reprojection(self, tmp_path, sequence_dir):
        # rebuild the render purely from manifest values
        out = tmp_path / "data"
        seq = load_sequence(sequence_dir)
        records = gen_paired(seq, out, 3, max_gap=5, seed=4)
        write_manifest(records, out / "manifest.jsonl")
        row = read_manifest(out / "manifest.jsonl")[0]
        rel = Pose.from_matrix34(np.array(row["relative_pose"]).reshape(3, 4))
        result = reproject(
            seq.load_frame(row["source_frame_index"]), seq.intrinsics,
            rel, RenderConfig(splat_radius=row["splat_radius"]),
        )
        assert np.array_equal(
            imgio.load_color(out / row["source_reprojected_image"]), result.color
        )
        assert np.array_equal(imgio.load_mask(out / row["mask_image"]), result.mask)
        original = imgio.load_color(seq.frames[row["target_frame_index"]].color_path)
        assert np.array_equal(imgio.load_color(out / row["target_real_image"]), original)

    def test_deterministic_across_runs_and_threads(self, tmp_path, sequence_dir):
        seq = load_sequence(sequence_dir)
        digests = []
        for name, threads in (("a", 1), ("b", 1), ("c", 4)):
            out = tmp_path / name
            records = gen_paired(seq, out, 8, max_gap=6, seed=11, threads=threads)
            write_manifest(records, out / "manifest.jsonl")
            digests.append(helpers.tree_digest(out))
        assert digests[0] == digests[1] == digests[2]

    def test_different_seed_changes_sampling(self, tmp_path, sequence_dir):
        seq = load_sequence(sequence_dir)
        r1 = gen_paired(seq, tmp_path / "a", 8, seed=0)
        r2 = gen_paired(seq, tmp_path / "b", 8, seed=1)
        pairs1 = {(r.source_frame_index, r.target_frame_index) for r in r1}
        pairs2 = {(r.source_frame_index, r.target_frame_index) for r in r2}
        assert pairs1 != pairs2

    def test_exhaustion_emits_all_combos_with_warning(self, tmp_path, caplog):
        root = tmp_path / "s"
        helpers.write_sequence(root, n_frames=3)
        seq = load_sequence(root)
        with caplog.at_level(logging.WARNING):
            records = gen_paired(seq, tmp_path / "d", 50, max_gap=10, seed=0)
        pairs = {(r.source_frame_index, r.target_frame_index) for r in records}
        assert pairs == {(0, 1), (0, 2), (1, 2)}
        assert any("50" in m for m in caplog.messages)

    def test_request_of_exactly_all_combos(self, tmp_path):
        root = tmp_path / "s"
        helpers.write_sequence(root, n_frames=3)
        seq = load_sequence(root)
        records = gen_paired(seq, tmp_path / "d", 3, max_gap=10, seed=0)
        assert len(records) == 3

    def test_wide_gaps_produce_holes(self, tmp_path):
        root = tmp_path / "s"
        helpers.write_sequence(root, n_frames=12, step=(0.03, 0.0, 0.0),
                               yaw_step_deg=1.2, seed=5)
        seq = load_sequence(root)
        out = tmp_path / "d"
        records = gen_paired(seq, out, 200, max_gap=10, seed=0)
        wide = [r for r in records if r.target_frame_index - r.source_frame_index >= 5]
        assert len(wide) >= 20
        with_holes = sum(
            1 for r in wide if not imgio.load_mask(out / r.mask_image).all()
        )
        assert with_holes / len(wide) >= 0.99

    def test_too_short_sequence(self, tmp_path):
        root = tmp_path / "s"
        helpers.write_sequence(root, n_frames=1)
        seq = load_sequence(root)
        with pytest.raises(SequenceError):
            gen_paired(seq, tmp_path / "d", 1)

    def test_invalid_arguments(self, sequence_dir, tmp_path):
        seq = load_sequence(sequence_dir)
        with pytest.raises(ValueError):
            gen_paired(seq, tmp_path / "d", 0)
        with pytest.raises(ValueError):
            gen_paired(seq, tmp_path / "d", 1, max_gap=0)


class TestGenUnpaired:
    def test_contract(self, tmp_path, sequence_dir):
        seq = load_sequence(sequence_dir)
        out = tmp_path / "data"
        ranges = PerturbationRanges(5.0, 5.0, 5.0, 0.05, 0.05, 0.05)
        records = gen_unpaired([seq], out, 20, ranges=ranges, seed=0)
        assert len(records) == 20
        write_manifest(records, out / "manifest.jsonl")
        rows = read_manifest(out / "manifest.jsonl")
        assert [r["item_id"] for r in rows] == [f"u{i:06d}" for i in range(20)]
        for row in rows:
            assert set(row) == UNPAIRED_KEYS
            assert abs(row["yaw_deg"]) <= 5.0
            assert abs(row["pitch_deg"]) <= 5.0
            assert abs(row["roll_deg"]) <= 5.0
            assert abs(row["tx_m"]) <= 0.05
            assert abs(row["ty_m"]) <= 0.05
            assert abs(row["tz_m"]) <= 0.05
            for key in ("source_image", "target_image", "mask_image"):
                assert (out / row[key]).is_file()

    def test_perturbation_matrix_matches_recorded_angles(self, tmp_path, sequence_dir):
        seq = load_sequence(sequence_dir)
        out = tmp_path / "data"
        records = gen_unpaired([seq], out, 10, seed=3)
        write_manifest(records, out / "manifest.jsonl")
        for row in read_manifest(out / "manifest.jsonl"):
            rebuilt = perturbation_pose(
                row["yaw_deg"], row["pitch_deg"], row["roll_deg"],
                (row["tx_m"], row["ty_m"], row["tz_m"]),
            )
            assert np.array_equal(
                np.array(row["perturbation"]), rebuilt.matrix34().ravel()
            )

    def test_ranges_are_actually_explored(self, tmp_path, sequence_dir):
        seq = load_sequence(sequence_dir)
        records = gen_unpaired([seq], tmp_path / "d", 200, seed=0)
        yaws = [r.yaw_deg for r in records]
        assert max(yaws) > 7.5 and min(yaws) < -7.5

    def test_zero_ranges_give_identity_reprojection(self, tmp_path):
        root = tmp_path / "s"
        helpers.write_sequence(root, n_frames=3, invalid_frac=0.1, seed=9)
        seq = load_sequence(root)
        out = tmp_path / "d"
        zero = PerturbationRanges(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        cfg = RenderConfig(splat_radius=0)
        records = gen_unpaired([seq], out, 4, ranges=zero, seed=0, cfg=cfg)
        for rec in records:
            frame = seq.load_frame(rec.frame_index)
            mask = imgio.load_mask(out / rec.mask_image)
            assert np.array_equal(mask, frame.valid_mask)
            source = imgio.load_color(out / rec.source_image)
            assert np.array_equal(source[mask], frame.color[mask])
            target = imgio.load_color(out / rec.target_image)
            assert np.array_equal(target, frame.color)

    def test_multiple_sequences_are_sampled(self, tmp_path):
        roots = []
        for i in range(2):
            root = tmp_path / f"s{i}"
            helpers.write_sequence(root, n_frames=4, seed=i)
            roots.append(load_sequence(root))
        records = gen_unpaired(roots, tmp_path / "d", 60, seed=0)
        assert {r.sequence_id for r in records} == {"s0", "s1"}

    def test_deterministic_across_runs_and_threads(self, tmp_path, sequence_dir):
        seq = load_sequence(sequence_dir)
        digests = []
        for name, threads in (("a", 1), ("b", 4)):
            out = tmp_path / name
            records = gen_unpaired([seq], out, 12, seed=8, threads=threads)
            write_manifest(records, out / "manifest.jsonl")
            digests.append(helpers.tree_digest(out))
        assert digests[0] == digests[1]

    def test_invalid_arguments(self, tmp_path, sequence_dir):
        seq = load_sequence(sequence_dir)
        with pytest.raises(ValueError):
            gen_unpaired([seq], tmp_path / "d", 0)
        with pytest.raises(SequenceError):
            gen_unpaired([], tmp_path / "d", 5)
        with pytest.raises(ValueError):
            PerturbationRanges(yaw_deg=-1.0)


class TestManifestIo:
    def test_round_trip_preserves_order_and_values(self, tmp_path, sequence_dir):
        seq = load_sequence(sequence_dir)
        records = gen_paired(seq, tmp_path / "d", 5, seed=2)
        path = tmp_path / "d" / "manifest.jsonl"
        write_manifest(records, path)
        rows = read_manifest(path)
        assert [r["pair_id"] for r in rows] == [r.pair_id for r in records]
        raw = path.read_bytes().decode("utf-8").strip().split("\n")
        assert len(raw) == 5
        for line in raw:
            json.loads(line)

    def test_float_precision_survives_json(self, tmp_path, sequence_dir):
        seq = load_sequence(sequence_dir)
        records = gen_paired(seq, tmp_path / "d", 4, seed=6)
        path = tmp_path / "d" / "manifest.jsonl"
        write_manifest(records, path)
        for row, rec in zip(read_manifest(path), records):
            assert np.array_equal(
                np.array(row["relative_pose"]),
                rec.relative_pose.matrix34().ravel(),
            )
