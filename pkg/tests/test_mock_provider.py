from __future__ import annotations

import pytest

from mediaclaw.capabilities import ResolvedArtifact
from mediaclaw.errors import BadParams
from mediaclaw.media import make_image, media_to_json, validate_media
from mediaclaw.providers.hashing import fnv1a64, hash_color
from mediaclaw.providers.mock import (
    mock_generate,
    qa_score,
    tts_duration_ms,
    tts_segments,
)


def oracle_fnv1a64(s: str) -> int:
    """Independent literal fold from the published FNV-1a constants."""
    h = 14695981039346656037
    for b in s.encode("utf-8"):
        h = ((h ^ b) * 1099511628211) % (1 << 64)
    return h


class TestHashing:
    # frozen from the independent oracle above
    FROZEN = {
        "red fox": 14123465857204021689,
        "red fox|end": 17271117200521232108,
        "1,2,3|visual_appeal": 3590350754420961893,
        "": 14695981039346656037,
    }

    @pytest.mark.parametrize("text,expected", sorted(FROZEN.items()))
    def test_frozen_values(self, text, expected):
        assert oracle_fnv1a64(text) == expected  # oracle agrees with its freeze
        assert fnv1a64(text) == expected

    def test_matches_oracle_on_arbitrary_strings(self):
        for text in ["a", "poster | X | y | z | neutral", "日本語テキスト", "x" * 500]:
            assert fnv1a64(text) == oracle_fnv1a64(text)

    def test_color_is_top_three_bytes_big_endian(self):
        value = oracle_fnv1a64("red fox")
        expected = ((value >> 56) & 0xFF, (value >> 48) & 0xFF, (value >> 40) & 0xFF)
        assert hash_color("red fox") == expected == (196, 0, 161)


def _img(fill, width=640, height=360):
    return ResolvedArtifact("img-id", make_image(fill, width, height))


class TestTextToImage:
    def test_fill_from_prompt_hash(self):
        media = mock_generate("text_to_image", {"prompt": "red fox"})
        validate_media(media)
        assert media.frames[0].fill_rgb == (196, 0, 161)
        assert media.width == 640 and media.height == 360
        assert media.meta["prompt_hash"] == f"{oracle_fnv1a64('red fox'):016x}"

    def test_label_is_prompt_prefix(self):
        media = mock_generate("text_to_image", {"prompt": "p" * 50})
        (overlay,) = media.frames[0].overlays
        assert overlay.text == "p" * 32 and overlay.role == "label"

    def test_deterministic(self):
        a = mock_generate("text_to_image", {"prompt": "same"})
        b = mock_generate("text_to_image", {"prompt": "same"})
        assert media_to_json(a) == media_to_json(b)


class TestTextToVideo:
    def test_endpoints_and_interpolation(self):
        media = mock_generate("text_to_video", {"prompt": "red fox", "duration_ms": 5000})
        validate_media(media)
        assert len(media.frames) == 25
        assert media.frames[0].fill_rgb == hash_color("red fox")
        assert media.frames[-1].fill_rgb == hash_color("red fox|end")

    def test_interpolation_rounds_half_up(self):
        # two frames apart by an odd delta: midpoint rounds up
        media = mock_generate("text_to_video", {"prompt": "x", "duration_ms": 600})
        c0, c1 = hash_color("x"), hash_color("x|end")
        mid = media.frames[1].fill_rgb
        for i in range(3):
            exact = c0[i] + (c1[i] - c0[i]) / 2
            assert mid[i] == int(exact + 0.5) if exact >= 0 else mid[i]

    def test_duration_must_be_on_grid(self):
        with pytest.raises(BadParams):
            mock_generate("text_to_video", {"prompt": "x", "duration_ms": 4999})

    def test_duration_must_be_positive(self):
        with pytest.raises(BadParams):
            mock_generate("text_to_video", {"prompt": "x", "duration_ms": 0})


class TestImageToVideo:
    def test_first_frame_is_input_fill(self):
        media = mock_generate("image_to_video", {
            "image": _img((10, 20, 30)), "prompt": "p", "duration_ms": 5000,
        })
        validate_media(media)
        assert media.frames[0].fill_rgb == (10, 20, 30)
        assert len(media.frames) == 25
        assert media.frames[-1].fill_rgb == hash_color("p")
        assert media.audio == []

    def test_inherits_image_dimensions(self):
        media = mock_generate("image_to_video", {
            "image": _img((0, 0, 0), width=320, height=200),
            "prompt": "p", "duration_ms": 1000,
        })
        assert (media.width, media.height) == (320, 200)

    def test_rejects_non_image(self):
        video = mock_generate("text_to_video", {"prompt": "v", "duration_ms": 200})
        with pytest.raises(BadParams):
            mock_generate("image_to_video", {
                "image": ResolvedArtifact("x", video), "prompt": "p", "duration_ms": 200,
            })


class TestImagesToVideo:
    def test_first_last_endpoints(self):
        media = mock_generate("multi_image_to_video", {
            "mode": "first_last",
            "images": [_img((0, 0, 0)), _img((100, 200, 50))],
            "prompt": "p", "duration_ms": 1000,
        })
        assert media.frames[0].fill_rgb == (0, 0, 0)
        assert media.frames[-1].fill_rgb == (100, 200, 50)

    def test_reference_mode_behaves_like_text_to_video(self):
        reference = mock_generate("multi_image_to_video", {
            "mode": "reference", "images": [_img((5, 5, 5))],
            "prompt": "p", "duration_ms": 1000,
        })
        plain = mock_generate("text_to_video", {"prompt": "p", "duration_ms": 1000})
        assert [f.fill_rgb for f in reference.frames] == [f.fill_rgb for f in plain.frames]
        assert reference.meta["reference_images"] == "img-id"

    def test_first_last_dimension_mismatch(self):
        with pytest.raises(BadParams):
            mock_generate("multi_image_to_video", {
                "mode": "first_last",
                "images": [_img((0, 0, 0)), _img((1, 1, 1), width=100, height=100)],
                "prompt": "p", "duration_ms": 1000,
            })


class TestTextToSpeech:
    def test_hello_world(self):
        media = mock_generate("text_to_speech", {"text": "hello world"})
        validate_media(media)
        assert [(s.t0_ms, s.t1_ms, s.text) for s in media.audio] == [
            (0, 400, "hello"), (400, 800, "world")]
        assert media.duration_ms == 800
        assert all(s.loudness_lufs == -20.0 for s in media.audio)

    def test_segments_abut(self):
        segments = tts_segments("a bb ccc")
        assert [(s.t0_ms, s.t1_ms) for s in segments] == [(0, 80), (80, 240), (240, 480)]

    def test_whitespace_excluded_from_counts(self):
        assert tts_duration_ms("  hi   there  ") == 80 * 2 + 80 * 5

    def test_empty_text(self):
        media = mock_generate("text_to_speech", {"text": ""})
        assert media.audio == [] and media.duration_ms == 0


class TestDigitalAvatar:
    def test_duration_rounds_up_to_grid(self):
        # "hi!" = 3 chars -> 240 ms speech -> 400 ms video
        media = mock_generate("digital_avatar", {
            "text": "hi!", "avatar_id": "anna", "action_id": "wave_hand"})
        validate_media(media)
        assert media.duration_ms == 400
        assert len(media.frames) == 2

    def test_fill_from_avatar_id(self):
        media = mock_generate("digital_avatar", {
            "text": "x", "avatar_id": "anna", "action_id": "a"})
        assert media.frames[0].fill_rgb == hash_color("anna")

    def test_lip_tokens_cover_frames(self):
        text = "hello world again"
        media = mock_generate("digital_avatar", {
            "text": text, "avatar_id": "a", "action_id": "act"})
        segments = tts_segments(text)
        for frame in media.frames:
            covering = [s for s in segments if s.t0_ms <= frame.t_ms < s.t1_ms]
            assert len(covering) == 1
            assert frame.tags["lip_token"] == covering[0].text
            assert frame.tags["action_id"] == "act"


class TestImageQa:
    def test_score_question(self):
        media = mock_generate("image_qa", {
            "image": _img((1, 2, 3)),
            "question": "score:visual_appeal|poster | X | y | z | neutral",
        })
        expected = 60 + oracle_fnv1a64("1,2,3|visual_appeal") % 41
        assert media.text == str(expected) == "97"
        assert qa_score((1, 2, 3), "visual_appeal") == expected

    def test_score_range(self):
        for fill in [(0, 0, 0), (255, 255, 255), (7, 77, 177)]:
            for dim in ["a", "b", "subject_prominence"]:
                assert 60 <= qa_score(fill, dim) <= 100

    def test_refine_question(self):
        media = mock_generate("image_qa", {
            "image": _img((9, 8, 7)), "question": "refine: shot 2/3: sea",
        })
        assert media.text == "shot 2/3: sea | palette:9,8,7"

    def test_echo_question(self):
        media = mock_generate("image_qa", {
            "image": _img((1, 1, 1)), "question": "what is this?",
        })
        assert media.text == "image(1,1,1): what is this?"


class TestTextGeneration:
    def test_freeform_echo(self):
        media = mock_generate("text_generation", {"prompt": "say hi", "mode": "freeform"})
        assert media.text == "say hi"

    def test_storyboard_template(self):
        media = mock_generate("text_generation",
                              {"prompt": "3|sunrise over sea", "mode": "storyboard"})
        assert media.text.split("\n") == [
            "shot 1/3: sunrise over sea",
            "shot 2/3: sunrise over sea",
            "shot 3/3: sunrise over sea",
        ]

    def test_brief_template_fills_defaults(self):
        media = mock_generate("text_generation", {
            "prompt": "product=X-Cup|audience=|points=|tone=", "mode": "brief"})
        assert media.text == "poster | X-Cup | general consumers | X-Cup | neutral"

    def test_action_plan_template(self):
        media = mock_generate("text_generation", {
            "prompt": "Breaking news. Nothing special.", "mode": "action_plan"})
        assert media.text.split("\n") == [
            "Breaking news.\temphasize_point",
            "Nothing special.\tneutral_stand",
        ]


def test_mock_determinism_across_capabilities():
    cases = [
        ("text_to_image", {"prompt": "p"}),
        ("text_to_video", {"prompt": "p", "duration_ms": 1000}),
        ("text_to_speech", {"text": "a b c"}),
        ("digital_avatar", {"text": "hi", "avatar_id": "v", "action_id": "w"}),
        ("image_qa", {"image": _img((4, 5, 6)), "question": "q"}),
        ("text_generation", {"prompt": "p", "mode": "freeform"}),
    ]
    for capability, params in cases:
        assert (media_to_json(mock_generate(capability, params))
                == media_to_json(mock_generate(capability, params)))
