import os

os.environ.setdefault("MPLBACKEND", "Agg")

import pytest
from fixture import *
