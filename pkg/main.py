#!/usr/bin/env python3
"""Entry point for the pulse-vqgo command line."""

from pulse_vqgo.main import main

if __name__ == "__main__":
    main()
