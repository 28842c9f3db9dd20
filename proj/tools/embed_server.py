#!/usr/bin/env python3
"""Minimal sentence-embedding service for `brd embed` with a named encoder.

    python3 tools/embed_server.py --port 8765
    export BRD_EMBED_ENDPOINT=http://127.0.0.1:8765/embed
    brd embed --provider sahaj-bert

POST /embed {"model": "<hf id>", "texts": [...]}
  -> {"dimension": n, "pooling": "mean", "embeddings": [[...], ...]}

Token vectors of the last hidden layer are mean-pooled over the attention mask.
Models load lazily and stay cached for the life of the process.
"""
import argparse
import json
import os
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import torch
from transformers import AutoModel, AutoTokenizer

_models = {}


def load(model_id):
    if model_id not in _models:
        tok = AutoTokenizer.from_pretrained(model_id)
        model = AutoModel.from_pretrained(model_id).eval()
        _models[model_id] = (tok, model)
    return _models[model_id]


@torch.no_grad()
def embed(model_id, texts, max_length):
    tok, model = load(model_id)
    batch = tok(texts, padding=True, truncation=True, max_length=max_length, return_tensors="pt")
    hidden = model(**batch).last_hidden_state
    mask = batch["attention_mask"].unsqueeze(-1).to(hidden.dtype)
    pooled = (hidden * mask).sum(1) / mask.sum(1).clamp(min=1)
    return pooled.tolist()


class Handler(BaseHTTPRequestHandler):
    token = None
    max_length = 256

    def do_POST(self):
        if self.path != "/embed":
            return self.send_error(404)
        if self.token and self.headers.get("Authorization") != f"Bearer {self.token}":
            return self.send_error(401)
        try:
            body = json.loads(self.rfile.read(int(self.headers.get("Content-Length", 0))))
            vectors = embed(body["model"], list(body["texts"]), self.max_length)
        except (KeyError, ValueError, TypeError) as e:
            return self.send_error(400, str(e))
        except OSError as e:
            return self.send_error(502, str(e))
        out = json.dumps({"dimension": len(vectors[0]) if vectors else 0, "pooling": "mean",
                          "embeddings": vectors}).encode()
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(out)))
        self.end_headers()
        self.wfile.write(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--host", default="127.0.0.1")
    ap.add_argument("--port", type=int, default=8765)
    ap.add_argument("--max-length", type=int, default=256)
    args = ap.parse_args()
    Handler.token = os.environ.get("BRD_EMBED_TOKEN")
    Handler.max_length = args.max_length
    ThreadingHTTPServer((args.host, args.port), Handler).serve_forever()


if __name__ == "__main__":
    main()
