"""code-arena: a mutation-testing duel game over the MiniLang teaching language."""

__version__ = "0.1.0"
