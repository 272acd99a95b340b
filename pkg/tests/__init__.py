"""Tests for wiki_grounding package."""
