"""
Testes do projeto UOCM
"""

