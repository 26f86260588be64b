"""Tests for the interactive shell."""

import os
from io import StringIO

import pytest

from src.ui.repl import ReplShell

FAMILY = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "programs", "family.sqclp")


class ScriptedSession:
    """Stands in for a prompt session by replaying fixed input lines."""

    def __init__(self, lines):
        self.lines = list(lines)
        self.prompts = 0

    def prompt(self, message):
        self.prompts += 1
        if not self.lines:
            raise EOFError
        line = self.lines.pop(0)
        if line is KeyboardInterrupt:
            raise KeyboardInterrupt
        return line


@pytest.fixture
def shell():
    return ReplShell(FAMILY, stdout=StringIO())


def send(shell, line):
    shell.stdout.seek(0)
    shell.stdout.truncate()
    stop = shell.onecmd(shell.precmd(line))
    return stop, shell.stdout.getvalue().splitlines()


class TestCommands:

    def test_goal(self, shell):
        _, lines = send(shell, "?- ancestor(tom,Y)#W")
        assert lines == ["Y = bob, W = true", "Y = liz, W = true", "Y = ann, W = true",
                         "Y = pat, W = true", "Y = jim, W = true"]

    def test_no_answer(self, shell):
        assert send(shell, "?- parent(jim,Y)#W")[1] == ["no"]

    def test_parse_error_keeps_the_shell(self, shell):
        stop, lines = send(shell, "?- ancestor(tom")
        assert not stop
        assert lines[0] == "error: cannot parse input"
        assert "[parse]" in lines[1]

    def test_depth(self, shell):
        assert send(shell, ":depth")[1] == ["depth = 6"]
        assert send(shell, ":depth 2")[1] == ["depth = 2"]
        assert len(send(shell, "?- ancestor(tom,Y)#W")[1]) == 2
        assert send(shell, ":depth -1")[1] == ["depth must be an integer of at least 0"]

    def test_limit(self, shell):
        assert send(shell, ":limit 0")[1] == ["limit must be an integer of at least 1"]
        send(shell, ":limit 1")
        assert send(shell, "?- ancestor(tom,Y)#W")[1] == ["Y = bob, W = true"]

    def test_collect(self, shell):
        assert send(shell, ":collect")[1] == ["collect = off"]
        assert send(shell, ":collect on")[1] == ["collect = on"]
        assert shell.options.collect

    def test_program(self, shell):
        lines = send(shell, ":program")[1]
        assert lines[:2] == ["#qdom B", "#cdom H"]
        assert "ancestor(X,Y) :- parent(X,Y)" in lines

    def test_unknown_input(self, shell):
        assert send(shell, "ancestor(tom,Y)")[1][0].startswith("unknown input")

    def test_quit(self, shell):
        assert send(shell, ":quit")[0] is True
        assert send(shell, ":exit")[0] is True


class TestReload:

    def test_reload(self, shell):
        assert send(shell, ":reload")[1] == [f"reloaded {FAMILY}: 11 clauses"]

    def test_broken_file_keeps_the_program(self, tmp_path):
        path = tmp_path / "p.sqclp"
        path.write_text("p(a).\n", encoding="utf-8")
        shell = ReplShell(str(path), stdout=StringIO())
        path.write_text("p(a) <-0-\n", encoding="utf-8")
        lines = send(shell, ":reload")[1]
        assert lines[0] == "error: program is not admissible"
        assert lines[-1] == "keeping the previous program"
        assert send(shell, "?- p(X)#W")[1] == ["X = a, W = 1"]


class TestLoop:

    def test_session_lines_until_end_of_input(self):
        session = ScriptedSession(["?- male(X)#W", KeyboardInterrupt, "", ":limit 1"])
        shell = ReplShell(FAMILY, session=session, stdout=StringIO())
        shell.cmdloop()
        lines = shell.stdout.getvalue().splitlines()
        assert lines[0].startswith("sqclp 1.0.0.")
        assert lines[1:] == ["X = tom, W = true", "X = bob, W = true", "X = jim, W = true", "limit = 1"]
        assert session.prompts == 5

    def test_quit_ends_the_loop(self):
        session = ScriptedSession([":quit", "?- male(X)#W"])
        shell = ReplShell(FAMILY, session=session, stdout=StringIO())
        shell.cmdloop()
        assert session.prompts == 1
