"""twowell tests."""
