"""Deterministic tiny stand-in checkpoints.

CI and offline environments cannot pull the production models, so this
module materializes small random-weight substitutes (fixed seed) with the
same serving contract: a word-level tokenizer capped at 512 tokens, an
encoder for /embed, and a 7-label classification head for /classify.
Stand-ins keep the contracts honest; they carry no semantics.

    python -c "from redline_sidecar.standins import build_standin_models; \
               print(build_standin_models('stand-ins'))"
"""

from __future__ import annotations

from pathlib import Path

from .models import EMOTIONS

STANDIN_SEED = 20240601

# vocabulary source: the embed-ordering fixture plus review-comment words
EMBED_FIXTURE_BASE = (
    "def scale_rows(matrix, factor):\n"
    "    scaled = []\n"
    "    for row in matrix:\n"
    "        scaled.append([cell * factor for cell in row])\n"
    "    return scaled\n"
)
EMBED_FIXTURE_TWIN = (
    "def scale_rows(grid, ratio):\n"
    "    out = []\n"
    "    for line in grid:\n"
    "        out.append([item * ratio for item in line])\n"
    "    return out\n"
)
EMBED_FIXTURE_UNRELATED = (
    "def read_config(path):\n"
    "    with open(path) as handle:\n"
    "        raw = handle.read()\n"
    "    return raw.splitlines()\n"
)

STANDIN_CORPUS = [
    EMBED_FIXTURE_BASE,
    EMBED_FIXTURE_TWIN,
    EMBED_FIXTURE_UNRELATED,
    "Thanks , this looks great !",
    "Please fix the loop bounds before merging .",
    "I am worried this duplicates an existing helper .",
    "nice work overall , small nits inline",
    "why was the old parser removed ?",
    "token word filler text for counting tests",
    "Review pass : looks reasonable for this change .",
    "Please double-check the loop bounds in this change .",
]


def _build_tokenizer():
    from tokenizers import Tokenizer, models, pre_tokenizers, processors
    from transformers import PreTrainedTokenizerFast

    pre = pre_tokenizers.Whitespace()
    seen: dict[str, None] = {}
    for text in STANDIN_CORPUS:
        for token, _ in pre.pre_tokenize_str(text):
            seen.setdefault(token, None)
    vocab = {"<s>": 0, "<pad>": 1, "</s>": 2, "<unk>": 3}
    for word in sorted(seen):
        vocab[word] = len(vocab)
    tokenizer = Tokenizer(models.WordLevel(vocab, unk_token="<unk>"))
    tokenizer.pre_tokenizer = pre
    tokenizer.post_processor = processors.TemplateProcessing(
        single="<s> $A </s>",
        pair="<s> $A </s> </s> $B </s>",
        special_tokens=[("<s>", 0), ("</s>", 2)],
    )
    return PreTrainedTokenizerFast(
        tokenizer_object=tokenizer,
        model_max_length=512,
        bos_token="<s>",
        eos_token="</s>",
        pad_token="<pad>",
        unk_token="<unk>",
    )


def build_standin_models(target_dir: str | Path) -> tuple[Path, Path]:
    """Write embed/ and emotion/ checkpoints under target_dir; returns both paths."""
    import torch
    from transformers import RobertaConfig, RobertaForSequenceClassification, RobertaModel

    target_dir = Path(target_dir)
    tokenizer = _build_tokenizer()
    vocab_size = len(tokenizer)

    torch.manual_seed(STANDIN_SEED)
    hidden = 128
    if vocab_size > hidden:
        raise ValueError("stand-in vocabulary outgrew the embedding width")
    common = dict(
        vocab_size=vocab_size,
        hidden_size=hidden,
        num_attention_heads=2,
        intermediate_size=2 * hidden,
        max_position_embeddings=514,
        pad_token_id=1,
        bos_token_id=0,
        eos_token_id=2,
    )

    # the embed stand-in is a bag-of-embeddings encoder by construction:
    # no mixing layers, positions zeroed, orthonormal word vectors (QR).
    # mean-pooled cosine then tracks token overlap, making the
    # twin-vs-unrelated ordering a structural property instead of a
    # random-weight accident
    embed_model = RobertaModel(RobertaConfig(**common, num_hidden_layers=0))
    with torch.no_grad():
        generator = torch.Generator().manual_seed(STANDIN_SEED)
        basis, _ = torch.linalg.qr(torch.randn(hidden, hidden, generator=generator))
        embeddings = embed_model.embeddings
        embeddings.word_embeddings.weight.copy_(basis[:vocab_size])
        embeddings.position_embeddings.weight.zero_()
        embeddings.token_type_embeddings.weight.zero_()
    embed_dir = target_dir / "embed"
    embed_model.save_pretrained(embed_dir)
    tokenizer.save_pretrained(embed_dir)

    labels = sorted(EMOTIONS)
    emotion_dir = target_dir / "emotion"
    emotion_config = RobertaConfig(
        **common,
        num_hidden_layers=1,
        num_labels=7,
        id2label={i: name for i, name in enumerate(labels)},
        label2id={name: i for i, name in enumerate(labels)},
    )
    RobertaForSequenceClassification(emotion_config).save_pretrained(emotion_dir)
    tokenizer.save_pretrained(emotion_dir)
    return embed_dir, emotion_dir
