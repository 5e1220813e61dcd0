"""comrade: complementary companion AI framework with a deterministic
tower-defense testbed, scripted-player harness, and live session service."""

__version__ = "0.1.0"
