"""The entry point of the command line."""

from linkforge import linear_framework
linear_framework.run()
