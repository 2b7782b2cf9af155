"""Modulation, channel and detection for the coded mMIMO link."""
