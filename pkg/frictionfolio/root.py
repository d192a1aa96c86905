import os

ASSET_PATH = os.path.join(os.path.dirname(__file__), "assets")
