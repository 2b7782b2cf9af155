"""GF(2) arithmetic, random linear codes and GRAND decoding."""
