import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pan_domain.wire import FIELDS, Envelope, iter_frames, unframe

text = st.text(max_size=20)
envelopes = st.builds(
    Envelope,
    type=text,
    request_id=text,
    src=text,
    dst=text,
    payload_hex=st.binary(max_size=64).map(bytes.hex),
    sig_hex=st.binary(max_size=64).map(bytes.hex),
    ts=st.integers(min_value=0, max_value=2**40),
)


def test_exact_fields():
    env = Envelope("t", "r", "a", "b", "00", "11", 5)
    assert set(json.loads(env.to_json())) == set(FIELDS)
    assert env.payload == b"\x00" and env.sig == b"\x11"


@pytest.mark.parametrize("mutate", [lambda d: d.pop("ts"), lambda d: d.update(extra=1)])
def test_rejects_other_field_sets(mutate):
    rec = json.loads(Envelope("t", "r", "a", "b").to_json())
    mutate(rec)
    with pytest.raises(ValueError):
        Envelope.from_json(json.dumps(rec))


def test_frame_prefix():
    env = Envelope("t", "r", "a", "b")
    framed = env.frame()
    assert int.from_bytes(framed[:4], "big") == len(framed) - 4


@given(st.lists(envelopes, max_size=5))
def test_frame_stream_roundtrip(envs):
    buf = b"".join(e.frame() for e in envs)
    assert list(iter_frames(buf)) == envs


@given(envelopes)
def test_json_roundtrip(env):
    assert Envelope.from_json(env.to_json()) == env


def test_short_frames():
    framed = Envelope("t", "r", "a", "b").frame()
    with pytest.raises(ValueError):
        unframe(framed[:3])
    with pytest.raises(ValueError):
        unframe(framed[:-1])
