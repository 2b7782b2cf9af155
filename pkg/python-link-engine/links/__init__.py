"""Per-channel-model trial pipelines."""
