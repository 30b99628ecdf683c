# Copyright 2026 The factfix Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.


"""HTTP shim serving /embed, /entail, /generate, /rerank and /spans.

Run with ``python -m factfix.shim --stub`` for the deterministic stand-ins, or
pass model ids to serve real models. Point the engine at it with
FACTFIX_SHIM_URL.
"""

from __future__ import annotations

import argparse
import json
import logging
import threading
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any, Callable

from . import _core

log = logging.getLogger("factfix.shim")

ENDPOINTS = ("embed", "entail", "generate", "rerank", "spans")


class SchemaError(ValueError):
    pass


class Unavailable(RuntimeError):
    pass


@dataclass
class ShimConfig:
    embed_model_id: str | None = None
    nli_model_id: str | None = None
    rerank_model_id: str | None = None
    # Extra cross-encoders addressed by the "model" field of /rerank.
    rerank_models: dict[str, str] = field(default_factory=dict)
    ner_model_id: str | None = None
    generation_upstream_url: str | None = None
    generation_model: str = "default"
    device: str = "cpu"
    max_batch: int = 32
    stub: bool = False
    stub_seed: int = 0
    stub_dim: int = 64

    def validate(self) -> None:
        if self.max_batch < 1:
            raise ValueError("max_batch must be >= 1")
        if self.device not in ("cpu", "gpu"):
            raise ValueError("device must be cpu or gpu")


def _strings(payload: dict, key: str) -> list[str]:
    value = payload.get(key)
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise SchemaError(f"'{key}' must be a list of strings")
    return value


def _string(payload: dict, key: str) -> str:
    value = payload.get(key)
    if not isinstance(value, str):
        raise SchemaError(f"'{key}' must be a string")
    return value


def validate_request(endpoint: str, payload: Any) -> None:
    if not isinstance(payload, dict):
        raise SchemaError("payload must be a JSON object")
    if endpoint == "embed":
        _strings(payload, "texts")
    elif endpoint == "entail":
        _string(payload, "premise")
        _string(payload, "hypothesis")
    elif endpoint == "generate":
        _string(payload, "prompt")
    elif endpoint == "rerank":
        _string(payload, "query")
        _strings(payload, "docs")
        if "model" in payload and not isinstance(payload["model"], str):
            raise SchemaError("'model' must be a string")
    elif endpoint == "spans":
        _string(payload, "text")


class StubBackend:
    """The engine's own deterministic stand-ins."""

    def __init__(self, cfg: ShimConfig):
        self.cfg = cfg

    def health(self) -> dict[str, bool]:
        return {name: True for name in ENDPOINTS}

    def handle(self, endpoint: str, payload: dict) -> dict:
        out = _core.stub_handle("/" + endpoint, json.dumps(payload), self.cfg.stub_seed, self.cfg.stub_dim)
        return json.loads(out)


class ModelBackend:
    """Real models. Each one loads at startup; a model that fails to load
    turns its endpoint into a 503 carrying the reason."""

    def __init__(self, cfg: ShimConfig):
        self.cfg = cfg
        self.device = "cuda" if cfg.device == "gpu" else "cpu"
        self.models: dict[str, Any] = {}
        self.missing: dict[str, str] = {}
        self.locks: dict[str, threading.Lock] = {}
        self._load("embed", cfg.embed_model_id, self._load_embedder)
        self._load("entail", cfg.nli_model_id, self._load_nli)
        self._load("rerank", cfg.rerank_model_id, self._load_cross_encoder)
        for name, model_id in cfg.rerank_models.items():
            self._load("rerank:" + name, model_id, self._load_cross_encoder)
        if cfg.ner_model_id:
            self._load("ner", cfg.ner_model_id, self._load_ner)
        if not cfg.generation_upstream_url:
            self.missing["generate"] = "no generation_upstream_url configured"

    def _load(self, key: str, model_id: str | None, loader: Callable[[str], Any]) -> None:
        self.locks[key] = threading.Lock()
        if not model_id:
            self.missing[key] = "no model configured"
            return
        try:
            self.models[key] = loader(model_id)
            log.info("loaded %s model %s", key, model_id)
        except Exception as exc:  # noqa: BLE001
            self.missing[key] = f"{model_id}: {exc}"
            log.warning("could not load %s model %s: %s", key, model_id, exc)

    def _load_embedder(self, model_id: str) -> Any:
        from sentence_transformers import SentenceTransformer

        return SentenceTransformer(model_id, device=self.device)

    def _load_cross_encoder(self, model_id: str) -> Any:
        from sentence_transformers import CrossEncoder

        return CrossEncoder(model_id, device=self.device)

    def _load_nli(self, model_id: str) -> Any:
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModelForSequenceClassification.from_pretrained(model_id).to(self.device).eval()
        labels = {i: str(name).lower() for i, name in model.config.id2label.items()}
        entail = [i for i, name in labels.items() if name.startswith("entail")]
        if len(entail) != 1:
            raise ValueError(f"no single entailment label in {labels}")
        return tokenizer, model, entail[0]

    def _load_ner(self, model_id: str) -> Any:
        from transformers import pipeline

        return pipeline("ner", model=model_id, aggregation_strategy="simple",
                        device=0 if self.device == "cuda" else -1)

    def health(self) -> dict[str, bool]:
        return {
            "embed": "embed" in self.models,
            "entail": "entail" in self.models,
            "rerank": "rerank" in self.models,
            "generate": "generate" not in self.missing,
            "spans": True,
        }

    def _model(self, key: str) -> Any:
        if key not in self.models:
            raise Unavailable(self.missing.get(key, f"unknown model '{key}'"))
        return self.models[key]

    def handle(self, endpoint: str, payload: dict) -> dict:
        return getattr(self, "_" + endpoint)(payload)

    def _embed(self, payload: dict) -> dict:
        model = self._model("embed")
        with self.locks["embed"]:
            vectors = model.encode(payload["texts"], batch_size=self.cfg.max_batch, normalize_embeddings=True)
        return {"vectors": [[float(x) for x in v] for v in vectors]}

    def _entail(self, payload: dict) -> dict:
        import torch

        tokenizer, model, index = self._model("entail")
        with self.locks["entail"], torch.no_grad():
            batch = tokenizer(payload["premise"], payload["hypothesis"], return_tensors="pt", truncation=True)
            probs = model(**batch.to(self.device)).logits.softmax(-1)[0]
        return {"entailment": float(probs[index])}

    def _rerank(self, payload: dict) -> dict:
        key = "rerank" if not payload.get("model") else "rerank:" + payload["model"]
        model = self._model(key)
        pairs = [(payload["query"], d) for d in payload["docs"]]
        with self.locks[key]:
            scores = model.predict(pairs, batch_size=self.cfg.max_batch) if pairs else []
        return {"scores": [float(s) for s in scores]}

    def _spans(self, payload: dict) -> dict:
        text = payload["text"]
        spans = {(s, a, b) for s, a, b in _core.heuristic_spans(text)}
        if "ner" in self.models:
            with self.locks["ner"]:
                for ent in self.models["ner"](text):
                    a, b = int(ent["start"]), int(ent["end"])
                    spans.add((text[a:b], a, b))
        ordered = sorted(spans, key=lambda s: (s[1], s[0]))
        return {"spans": [{"surface": s, "start": a, "end": b} for s, a, b in ordered]}

    def _generate(self, payload: dict) -> dict:
        if "generate" in self.missing:
            raise Unavailable(self.missing["generate"])
        body = {
            "model": self.cfg.generation_model,
            "messages": [{"role": "user", "content": payload["prompt"]}],
            "max_tokens": int(payload.get("max_tokens", 128)),
            "temperature": float(payload.get("temperature", 0.0)),
        }
        url = self.cfg.generation_upstream_url.rstrip("/") + "/v1/chat/completions"
        request = urllib.request.Request(url, json.dumps(body).encode(), {"Content-Type": "application/json"})
        try:
            with urllib.request.urlopen(request, timeout=120) as response:
                reply = json.load(response)
        except (urllib.error.URLError, TimeoutError) as exc:
            raise Unavailable(f"upstream: {exc}") from exc
        return {"text": reply["choices"][0]["message"]["content"]}


def make_handler(backend: StubBackend | ModelBackend) -> type[BaseHTTPRequestHandler]:
    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def _reply(self, status: int, body: dict) -> None:
            data = json.dumps(body).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def do_GET(self) -> None:  # noqa: N802
            if self.path.rstrip("/") == "/health":
                self._reply(200, backend.health())
            else:
                self._reply(404, {"error": f"unknown path {self.path}"})

        def do_POST(self) -> None:  # noqa: N802
            endpoint = self.path.strip("/")
            length = int(self.headers.get("Content-Length", 0))
            raw = self.rfile.read(length)
            if endpoint not in ENDPOINTS:
                self._reply(404, {"error": f"unknown path {self.path}"})
                return
            try:
                payload = json.loads(raw or b"null")
                validate_request(endpoint, payload)
                self._reply(200, backend.handle(endpoint, payload))
            except (SchemaError, json.JSONDecodeError, ValueError) as exc:
                self._reply(400, {"error": str(exc)})
            except Unavailable as exc:
                self._reply(503, {"error": str(exc)})
            except Exception as exc:  # noqa: BLE001
                log.exception("%s failed", endpoint)
                self._reply(500, {"error": str(exc)})

        def log_message(self, fmt: str, *args: Any) -> None:
            log.debug("%s " + fmt, self.address_string(), *args)

    return Handler


def serve(cfg: ShimConfig, host: str = "127.0.0.1", port: int = 8080) -> ThreadingHTTPServer:
    """Builds the server; call serve_forever() on the result."""
    cfg.validate()
    backend = StubBackend(cfg) if cfg.stub else ModelBackend(cfg)
    server = ThreadingHTTPServer((host, port), make_handler(backend))
    server.daemon_threads = True
    return server


def main(argv: list[str] | None = None) -> None:
    p = argparse.ArgumentParser(prog="python -m factfix.shim", description=__doc__.splitlines()[0])
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--stub", action="store_true", help="serve the deterministic stand-ins")
    p.add_argument("--stub-seed", type=int, default=0)
    p.add_argument("--stub-dim", type=int, default=64)
    p.add_argument("--embed-model")
    p.add_argument("--nli-model")
    p.add_argument("--rerank-model")
    p.add_argument("--rerank-extra", action="append", default=[], metavar="NAME=MODEL_ID")
    p.add_argument("--ner-model")
    p.add_argument("--generation-upstream")
    p.add_argument("--generation-model", default="default")
    p.add_argument("--device", choices=["cpu", "gpu"], default="cpu")
    p.add_argument("--max-batch", type=int, default=32)
    p.add_argument("-v", "--verbose", action="store_true")
    args = p.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO)
    extra = dict(item.split("=", 1) for item in args.rerank_extra)
    cfg = ShimConfig(
        embed_model_id=args.embed_model,
        nli_model_id=args.nli_model,
        rerank_model_id=args.rerank_model,
        rerank_models=extra,
        ner_model_id=args.ner_model,
        generation_upstream_url=args.generation_upstream,
        generation_model=args.generation_model,
        device=args.device,
        max_batch=args.max_batch,
        stub=args.stub,
        stub_seed=args.stub_seed,
        stub_dim=args.stub_dim,
    )
    server = serve(cfg, args.host, args.port)
    log.info("listening on http://%s:%d", *server.server_address[:2])
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()


if __name__ == "__main__":
    main()
