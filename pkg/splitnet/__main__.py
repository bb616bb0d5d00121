#__main__.py
from .main import app

app()
