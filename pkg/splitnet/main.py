#main.py
from .main_factory import create_app

app = create_app()
