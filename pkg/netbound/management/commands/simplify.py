# Copyright (c) 2025 netbound developers
#
# This file is part of netbound
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program. If not, see <http://www.gnu.org/licenses/>.
from pathlib import Path

from netbound.fileformats import serialize_network
from netbound.management.commands._base import NetboundCommand
from netbound.pipeline import parse_script, run_pipeline


def _suffixed(path: str, tag: str) -> str:
    p = Path(path)
    return str(p.with_name(f"{p.stem}.{tag}{p.suffix}"))


class Command(NetboundCommand):
    help = "Simplify a network by a script of rewrites, or automatically."

    def add_command_arguments(self, parser):
        parser.add_argument("file", help="network file (JSON)")
        mode = parser.add_mutually_exclusive_group()
        mode.add_argument("--auto", action="store_true", help="apply rewrites greedily (default)")
        mode.add_argument("--script", help="script or trace file of rewrites to apply")
        parser.add_argument("--allow-bounding", action="store_true",
                            help="admit lower/upper rewrites in auto mode; writes one result per bound")
        parser.add_argument("--max-steps", type=int, default=None)
        parser.add_argument("--out", help="where to write the simplified network")
        parser.add_argument("--trace", help="where to write the trace")

    def run(self, file, **options):
        net = self.load_network(file)
        script = self.parse(options["script"], parse_script) if options.get("script") else None
        result = run_pipeline(net, script, options.get("max_steps"), options.get("allow_bounding", False))

        tracks = {"upper": result.upper, "lower": result.lower} if result.forked else {"result": result.upper}
        for tag, track in tracks.items():
            if options.get("out"):
                out = options["out"] if tag == "result" else _suffixed(options["out"], tag)
                self.write_text(out, serialize_network(track.network))
            if options.get("trace"):
                out = options["trace"] if tag == "result" else _suffixed(options["trace"], tag)
                self.write_text(out, track.trace.to_json())

        doc, lines = {}, []
        for tag, track in tracks.items():
            gap = track.trace.cumulative_gap
            doc[tag] = {
                "steps": [s.as_doc() for s in track.trace.steps],
                "cumulativeGap": str(gap) if gap is not None else "unknown",
                "nodes": len(track.network.nodes),
                "links": len(track.network.links),
            }
            lines.append(f"{tag}: {len(track.trace.steps)} step(s), cumulative gap "
                         f"{gap if gap is not None else 'unknown'}, {len(track.network.nodes)} nodes, "
                         f"{len(track.network.links)} links")
            lines += [f"  {i}: {s.op} {s.params} -> {s.direction.value}" for i, s in enumerate(track.trace.steps)]
        self.report(options, doc, "\n".join(lines))
