"""
sqclp: qualified constraint logic programming with proximity relations
Version: 1.0.0
"""
