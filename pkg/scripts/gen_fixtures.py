"""Regenerate everything under fixtures/ from the definitions below.

Run from the repository root:

    python3 scripts/gen_fixtures.py

The exemplar snapshot is embedded with the local hash provider at
dim 256, so regeneration is deterministic (created_at is pinned).
"""

import json
from pathlib import Path

from spacectl.embeddings import DEFAULT_DIM, LocalHashProvider
from spacectl.index import ExemplarRecord, VectorIndex, save_index
from spacectl.registry import ApiCall, ApiMetadata, Registry, save_registry

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

TAU = 0.5
CREATED_AT = "2025-06-01T00:00:00Z"

# Five intents, five utterances each. The utterance sets were tuned so
# that every utterance self-routes to its own class and a margin remains
# between TAU and both the hardest off-topic sentence and the easiest
# accepted paraphrase.
EXEMPLARS: dict[str, list[str]] = {
    "leave_office": [
        "I'm leaving the office",
        "leaving the office now",
        "I am leaving work now",
        "heading home, shut my office down",
        "leave the office",
    ],
    "aircon_on": [
        "turn on the air conditioner",
        "aircon on",
        "switch the aircon on",
        "start cooling this room",
        "please turn the ac on",
    ],
    "aircon_off": [
        "turn off the air conditioner",
        "aircon off",
        "switch the aircon off",
        "stop cooling this room",
        "please turn the ac off",
    ],
    "lights_on": [
        "turn on the lights",
        "switch the light on",
        "lights on please",
        "make it bright in here",
        "put the lights on in the room",
    ],
    "elevator_call": [
        "call the elevator",
        "bring the elevator to my floor",
        "elevator down please",
        "I need the lift",
        "call the lift to floor three",
    ],
}

# Shares no content token with any exemplar utterance above; the gate
# test asserts every sentence scores strictly below TAU.
OFF_TOPIC = [
    "what's today's weather forecast",
    "recommend a good sushi restaurant nearby",
    "who won yesterday's baseball game",
    "translate hello into french",
    "when does semester registration end",
    "play some jazz music",
    "how tall is mount fuji",
    "remind me about tomorrow's meeting",
    "what time does cafeteria open",
    "tell me a funny joke",
]

SIM_BASE = "http://127.0.0.1:8421"

REGISTRY = [
    ApiMetadata(
        api_id="aircon_off",
        transaction=(
            ApiCall(
                "PUT",
                f"{SIM_BASE}/api/airconditioner",
                '{"ac_id":"A305","on_off":"off"}',
            ),
        ),
    ),
    ApiMetadata(
        api_id="aircon_on",
        transaction=(
            ApiCall(
                "PUT",
                f"{SIM_BASE}/api/airconditioner",
                '{"ac_id":"A305","on_off":"on"}',
            ),
        ),
    ),
    ApiMetadata(
        api_id="elevator_call",
        transaction=(
            ApiCall("PUT", f"{SIM_BASE}/api/elevator", '{"operation":"3fup"}'),
        ),
    ),
    ApiMetadata(
        api_id="leave_office",
        transaction=(
            ApiCall(
                "PUT",
                f"{SIM_BASE}/api/airconditioner",
                '{"ac_id":"A305","on_off":"off"}',
            ),
            ApiCall(
                "PUT",
                f"{SIM_BASE}/api/light",
                '{"light_id":"A305","on_off":"off"}',
            ),
            ApiCall("PUT", f"{SIM_BASE}/api/elevator", '{"operation":"3fdown"}'),
        ),
    ),
    ApiMetadata(
        api_id="lights_on",
        transaction=(
            ApiCall(
                "PUT", f"{SIM_BASE}/api/light", '{"light_id":"A305","on_off":"on"}'
            ),
        ),
    ),
]

BUILDING = {
    "aircons": {
        "A305": {"power": "on", "setpoint": 24},
        "HALL1": {"power": "off"},
    },
    "lights": {
        "A305": {"power": "on"},
        "HALL1": {"power": "on"},
    },
    "elevator": {"current_floor": 1, "last_operation": ""},
    "spaces": {
        "A305": {"floor": 3, "ac_ids": ["A305"], "light_ids": ["A305"]},
        "HALL": {"floor": 1, "ac_ids": ["HALL1"], "light_ids": ["HALL1"]},
    },
}

CONFIG = {
    "provider": {"kind": "local_hash", "dim": DEFAULT_DIM},
    "tau": TAU,
    "exemplars_path": "exemplars.snapshot.json",
    "registry_path": "registry.json",
    "listen_address": "127.0.0.1:8400",
    "dry_run": False,
}


def _dump(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", "utf-8")
    print(f"wrote {path.relative_to(ROOT)}")


def main() -> None:
    FIXTURES.mkdir(exist_ok=True)
    (FIXTURES / "buildings").mkdir(exist_ok=True)

    raw = [
        {"apiId": api_id, "order": order}
        for api_id, orders in EXEMPLARS.items()
        for order in orders
    ]
    _dump(FIXTURES / "exemplars.json", raw)

    provider = LocalHashProvider(DEFAULT_DIM)
    index = VectorIndex()
    for api_id, orders in EXEMPLARS.items():
        for n, order in enumerate(orders, start=1):
            index.insert(
                ExemplarRecord(
                    record_id=f"{api_id}-{n:03d}",
                    api_id=api_id,
                    order=order,
                    embedding=provider.embed_text(order),
                )
            )
    index.created_at = CREATED_AT
    save_index(index, FIXTURES / "exemplars.snapshot.json")
    print(f"wrote {(FIXTURES / 'exemplars.snapshot.json').relative_to(ROOT)}")

    registry = Registry()
    for metadata in REGISTRY:
        registry.register(metadata)
    save_registry(registry, FIXTURES / "registry.json")
    print(f"wrote {(FIXTURES / 'registry.json').relative_to(ROOT)}")

    _dump(FIXTURES / "offtopic.json", OFF_TOPIC)
    _dump(FIXTURES / "buildings" / "default.json", BUILDING)
    _dump(FIXTURES / "config.json", CONFIG)


if __name__ == "__main__":
    main()
