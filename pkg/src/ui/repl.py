"""
Interactive shell: load a program once, then solve goals against it.

Goals are typed as in the ``run`` command (``?- p(X)#W | W >= 0.5``);
shell commands start with a colon.
"""

import cmd
import os
from dataclasses import replace
from typing import Optional, TextIO

from prompt_toolkit import PromptSession
from prompt_toolkit.history import FileHistory

from src.core.loader import load_file, prepare_goal
from src.core.parser import parse_goal
from src.core.printer import print_program
from src.core.solver import SearchOptions, solve
from src.models.constants import APP_NAME, DEFAULT_DEPTH, DEFAULT_LIMIT, REPL_PROMPT, VERSION
from src.models.errors import DiagnosticError, SqclpError
from src.utilities.logger import AppLogger
from src.utilities.settings import history_path

logger = AppLogger()


class ReplShell(cmd.Cmd):
    intro = f"{APP_NAME} {VERSION}. Enter goals as ?- ..., :help for commands, :quit to leave."
    prompt = REPL_PROMPT

    def __init__(self, path: str, depth: int = DEFAULT_DEPTH, limit: int = DEFAULT_LIMIT,
                 preset: Optional[str] = None, session: Optional[PromptSession] = None,
                 stdout: Optional[TextIO] = None):
        super().__init__(stdout=stdout)
        self.path = path
        self.preset = preset
        self.options = SearchOptions(depth=depth, limit=limit)
        self.session = session
        self.program = load_file(path, preset)

    def _write(self, text: str) -> None:
        self.stdout.write(text + "\n")

    def _session(self) -> PromptSession:
        if self.session is None:
            history = history_path()
            os.makedirs(os.path.dirname(history), exist_ok=True)
            self.session = PromptSession(history=FileHistory(history))
        return self.session

    def cmdloop(self, intro=None):
        self._write(intro or self.intro)
        while True:
            try:
                line = self._session().prompt(self.prompt)
            except EOFError:
                break
            except KeyboardInterrupt:
                continue
            if self.onecmd(self.precmd(line)):
                break

    def precmd(self, line: str) -> str:
        line = line.strip()
        if line.startswith("?-"):
            return "solve " + line
        if line.startswith(":"):
            return line[1:]
        return line

    def emptyline(self):
        pass

    def default(self, line):
        self._write(f"unknown input {line!r}: goals start with ?- and commands with a colon")

    def _error(self, exc: SqclpError) -> None:
        if isinstance(exc, DiagnosticError):
            self._write(f"error: {exc.message}")
            for diagnostic in exc.diagnostics:
                self._write(f"  {diagnostic}")
        else:
            self._write(f"error: {exc}")

    def do_solve(self, arg):
        """solve ?- GOAL: print the answers of a goal"""
        try:
            goal = prepare_goal(self.program, parse_goal(arg))
            found = False
            for solution in solve(self.program, goal, self.options):
                found = True
                self._write(str(solution))
            if not found:
                self._write("no")
        except SqclpError as exc:
            self._error(exc)

    def do_reload(self, arg):
        """reload: parse the program file again"""
        try:
            self.program = load_file(self.path, self.preset)
            self._write(f"reloaded {self.path}: {len(self.program.clauses)} clauses")
        except SqclpError as exc:
            self._error(exc)
            self._write("keeping the previous program")
        except OSError as exc:
            logger.error(f"Cannot reload {self.path}: {exc}", exc_info=True)
            self._write(f"error: {exc}")

    def _set_number(self, name: str, arg: str, low: int) -> None:
        text = arg.strip()
        if not text:
            self._write(f"{name} = {getattr(self.options, name)}")
            return
        if not text.isdigit() or int(text) < low:
            self._write(f"{name} must be an integer of at least {low}")
            return
        self.options = replace(self.options, **{name: int(text)})
        self._write(f"{name} = {text}")

    def do_depth(self, arg):
        """depth [N]: show or set the clause applications allowed per goal atom"""
        self._set_number("depth", arg, 0)

    def do_limit(self, arg):
        """limit [N]: show or set the maximum number of answers"""
        self._set_number("limit", arg, 1)

    def do_collect(self, arg):
        """collect on|off: add body constraints to the answers instead of requiring them"""
        value = arg.strip().lower()
        if value not in ("on", "off"):
            self._write(f"collect = {'on' if self.options.collect else 'off'}")
            return
        self.options = replace(self.options, collect=value == "on")
        self._write(f"collect = {value}")

    def do_program(self, arg):
        """program: print the loaded program"""
        self.stdout.write(print_program(self.program))

    def do_quit(self, arg):
        """quit: leave the shell"""
        return True

    do_exit = do_quit
    do_EOF = do_quit
