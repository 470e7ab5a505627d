from __future__ import annotations

import time

import pytest

from mediaclaw.errors import BadShotCount, ParamViolation
from mediaclaw.media import frame_at, media_to_json
from mediaclaw.skills.long_video import generate_storyboard, parse_storyboard
from mediaclaw.skills.poster import call_from_registry


def _fnv(s: str) -> int:
    h = 14695981039346656037
    for b in s.encode("utf-8"):
        h = ((h ^ b) * 1099511628211) % (1 << 64)
    return h


def _color(s: str) -> tuple[int, int, int]:
    h = _fnv(s)
    return ((h >> 56) & 0xFF, (h >> 48) & 0xFF, (h >> 40) & 0xFF)


class TestStoryboard:
    def test_template(self, system):
        storyboard, _ = generate_storyboard(call_from_registry(system.registry),
                                            "sunrise over sea", 3)
        assert [s.prompt for s in storyboard.shots] == [
            "shot 1/3: sunrise over sea",
            "shot 2/3: sunrise over sea",
            "shot 3/3: sunrise over sea",
        ]
        assert all(s.duration_ms == 5000 for s in storyboard.shots)
        assert [s.index for s in storyboard.shots] == [1, 2, 3]

    def test_single_shot(self, system):
        storyboard, _ = generate_storyboard(call_from_registry(system.registry), "x", 1)
        assert len(storyboard.shots) == 1

    def test_bad_shot_count(self, system):
        with pytest.raises(BadShotCount):
            generate_storyboard(call_from_registry(system.registry), "x", 0)

    def test_skill_rejects_zero_shots(self, system):
        with pytest.raises(ParamViolation):
            system.engine.run_skill("long_video", {"requirement": "x", "shot_count": 0})

    def test_parse_round_trip(self):
        storyboard = parse_storyboard("shot 1/2: a\nshot 2/2: a")
        assert len(storyboard.shots) == 2


class TestLongVideoRun:
    def _run(self, system, requirement="sunrise over sea", shot_count=3):
        run_id = system.engine.run_skill(
            "long_video", {"requirement": requirement, "shot_count": shot_count})
        record = system.engine.wait(run_id)
        assert record.state == "succeeded"
        return record, system.store.get_payload(record.final_outputs[0])

    def test_duration_additivity(self, system):
        _, final = self._run(system)
        assert final.duration_ms == 15000
        assert len(final.frames) == 75

    def test_boundary_continuity_exact(self, system):
        _, final = self._run(system)
        for boundary in (5000, 10000):
            left = frame_at(final, boundary - 200).fill_rgb
            right = frame_at(final, boundary).fill_rgb
            assert left == right

    def test_boundary_color_predicted_by_mock_rules(self, system):
        # segment 1 ends at color(hash(prompt1 + "|end")); the image_to_video
        # frame-0 rule carries it into segment 2 exactly
        _, final = self._run(system)
        prompt1 = "shot 1/3: sunrise over sea"
        assert frame_at(final, 5000).fill_rgb == _color(prompt1 + "|end")
        assert frame_at(final, 4800).fill_rgb == _color(prompt1 + "|end")

    def test_refined_prompts_come_from_image_qa(self, system):
        record, _ = self._run(system)
        segment2 = next(s for s in record.steps if s.name == "segment_2")
        bridge_id, refine_id, video_id = segment2.outputs
        bridge = system.store.get_payload(bridge_id)
        refined = system.store.get_payload(refine_id)
        fill = bridge.frames[0].fill_rgb
        expected = f"shot 2/3: sunrise over sea | palette:{fill[0]},{fill[1]},{fill[2]}"
        assert refined.text == expected
        video = system.store.get_payload(video_id)
        assert video.meta["prompt_hash"] == f"{_fnv(expected):016x}"

    def test_single_shot_degenerates_to_text_to_video(self, system):
        record, final = self._run(system, requirement="calm lake", shot_count=1)
        step_names = [s.name for s in record.steps]
        assert step_names == ["storyboard", "segment_1", "concatenate"]
        direct = system.registry.invoke_tool(
            "mediaclaw_text_to_video",
            {"prompt": "shot 1/1: calm lake", "duration_ms": 5000})
        direct_payload = system.store.get_payload(direct.artifact_id)
        assert [f.fill_rgb for f in final.frames] == \
            [f.fill_rgb for f in direct_payload.frames]

    def test_lineage_chain(self, system):
        record, _ = self._run(system)
        final_artifact = system.store.get(record.final_outputs[0])
        assert final_artifact.produced_by == (record.run_id, 4)
        assert len(final_artifact.inputs) == 3  # the three segments
        segment2 = system.store.get(final_artifact.inputs[1])
        assert segment2.kind == "video"
        bridge_id = segment2.inputs[0]
        bridge = system.store.get(bridge_id)
        assert bridge.kind == "image"
        assert bridge.inputs == [final_artifact.inputs[0]]

    def test_completes_quickly_with_mock(self, system):
        started = time.monotonic()
        self._run(system)
        assert time.monotonic() - started < 2.0

    def test_deterministic_across_runs(self, system):
        _, a = self._run(system)
        _, b = self._run(system)
        assert media_to_json(a) == media_to_json(b)
