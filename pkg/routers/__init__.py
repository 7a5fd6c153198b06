# Routers Package
from slowapi import Limiter
from slowapi.util import get_remote_address

# Rate Limiter, gemeinsam fuer main.py und alle Router
limiter = Limiter(key_func=get_remote_address)
