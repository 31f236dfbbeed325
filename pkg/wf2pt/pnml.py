# SPDX-License-Identifier: MIT
# Reading and writing the place/transition subset of PNML used for workflow nets.

import logging
import xml.etree.ElementTree as ET
from typing import Dict, List, Optional
from xml.dom import minidom

from wf2pt.petri_net import SILENT, SILENT_TOKEN, Activity, Arc, Label, LabeledNet, NotAWorkflowNetError, PlaceId, \
    TransitionId, WorkflowNet, WorkflowNetIssue, boundary_places, validate

logger = logging.getLogger(__name__)

PNML_NAMESPACE = "http://www.pnml.org/version-2009/grammar/pnml"
PTNET_TYPE = "http://www.pnml.org/version-2009/grammar/ptnet"

_NODE_TAGS = ("place", "transition", "arc")
_IGNORED_TAGS = ("name", "graphics", "toolspecific")


class MalformedXmlError(ValueError):
    pass


class UnsupportedFeatureError(ValueError):
    pass


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _children(element: ET.Element, tag: str) -> List[ET.Element]:
    return [child for child in element if _local(child.tag) == tag]


def _text_of(element: ET.Element, tag: str) -> Optional[str]:
    """Text of <tag><text>...</text></tag> below element, or None when there is no such child."""
    for child in _children(element, tag):
        for text in _children(child, "text"):
            return (text.text or "").strip()
        return ""
    return None


def _required_id(element: ET.Element) -> str:
    node_id = element.get("id")
    if not node_id:
        raise MalformedXmlError(f"<{_local(element.tag)}> without id attribute")
    return node_id


class _PnmlReader:

    def __init__(self) -> None:
        self.places: List[PlaceId] = []
        self.transitions: List[TransitionId] = []
        self.arcs: List[Arc] = []
        self.labels: Dict[TransitionId, Label] = {}
        self.marked: Dict[PlaceId, int] = {}

    def read_container(self, container: ET.Element) -> None:
        for element in container:
            tag = _local(element.tag)
            if tag == "page":
                self.read_container(element)
            elif tag == "place":
                self.read_place(element)
            elif tag == "transition":
                self.read_transition(element)
            elif tag == "arc":
                self.read_arc(element)
            elif tag not in _IGNORED_TAGS:
                logger.warning(f"ignoring unsupported PNML element <{tag}>")

    def read_place(self, element: ET.Element) -> None:
        place = _required_id(element)
        self.places.append(place)
        marking = _text_of(element, "initialMarking")
        if marking:
            try:
                tokens = int(marking)
            except ValueError:
                raise MalformedXmlError(f"initial marking of place {place} is not an integer: {marking}")
            if tokens:
                self.marked[place] = tokens

    def read_transition(self, element: ET.Element) -> None:
        transition = _required_id(element)
        self.transitions.append(transition)
        name = _text_of(element, "name")
        self.labels[transition] = SILENT if not name or name == SILENT_TOKEN else Activity(name)

    def read_arc(self, element: ET.Element) -> None:
        source, target = element.get("source"), element.get("target")
        if not source or not target:
            raise MalformedXmlError(f"arc {element.get('id')} without source or target")
        weight = _text_of(element, "inscription")
        if weight and weight != "1":
            raise UnsupportedFeatureError(f"arc ({source}, {target}) has weight {weight}, only weight 1 is supported")
        self.arcs.append((source, target))

    def workflow_net(self) -> WorkflowNet[Label]:
        try:
            net = LabeledNet(self.places, self.transitions, self.arcs, self.labels)
        except ValueError as e:
            raise MalformedXmlError(str(e))

        sources, sinks = boundary_places(net)
        issues = []
        if len(sources) != 1:
            issues.append(WorkflowNetIssue(1, "expected exactly one place with empty pre-set", tuple(sources)))
        if len(sinks) != 1:
            issues.append(WorkflowNetIssue(2, "expected exactly one place with empty post-set", tuple(sinks)))
        if issues:
            raise NotAWorkflowNetError("; ".join(str(i) for i in issues), issues)

        source, sink = sources[0], sinks[0]
        if self.marked and self.marked != {source: 1}:
            marked = ", ".join(f"{p}={n}" for p, n in self.marked.items())
            issue = WorkflowNetIssue(1, f"initial marking must be one token on source {source}, found {marked}",
                                     tuple(self.marked))
            raise NotAWorkflowNetError(str(issue), [issue])

        wfnet = WorkflowNet(net, source, sink)
        validation = validate(wfnet)
        if not validation.valid:
            raise NotAWorkflowNetError(str(validation), validation.issues)
        return wfnet


def read_pnml(data: bytes) -> WorkflowNet[Label]:
    """
    Parse one PNML net. Source and sink are the unique places with empty pre-set and post-set;
    the namespace is optional and unknown elements are skipped with a warning.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as e:
        raise MalformedXmlError(f"invalid XML: {e}")

    if _local(root.tag) == "net":
        nets = [root]
    elif _local(root.tag) == "pnml":
        nets = _children(root, "net")
    else:
        raise MalformedXmlError(f"unexpected root element <{_local(root.tag)}>")
    if len(nets) != 1:
        raise UnsupportedFeatureError(f"expected exactly one net, found {len(nets)}")

    reader = _PnmlReader()
    reader.read_container(nets[0])
    return reader.workflow_net()


def read_pnml_file(path: str) -> WorkflowNet[Label]:
    with open(path, "rb") as f:
        return read_pnml(f.read())


def _text_child(parent: ET.Element, tag: str, text: str) -> None:
    ET.SubElement(ET.SubElement(parent, tag), "text").text = text


def write_pnml(wfnet: WorkflowNet[Label], net_id: str = "net1") -> bytes:
    net = wfnet.net
    root = ET.Element("pnml", {"xmlns": PNML_NAMESPACE})
    net_element = ET.SubElement(root, "net", {"id": net_id, "type": PTNET_TYPE})
    page = ET.SubElement(net_element, "page", {"id": "page1"})
    for place in net.places:
        element = ET.SubElement(page, "place", {"id": place})
        if place == wfnet.source:
            _text_child(element, "initialMarking", "1")
    for transition in net.transitions:
        element = ET.SubElement(page, "transition", {"id": transition})
        _text_child(element, "name", str(net.label(transition)))
    for i, (source, target) in enumerate(net.arcs, start=1):
        ET.SubElement(page, "arc", {"id": f"arc{i}", "source": source, "target": target})
    return minidom.parseString(ET.tostring(root, encoding="utf-8")).toprettyxml(indent="  ", encoding="utf-8")


def write_pnml_file(wfnet: WorkflowNet[Label], path: str) -> None:
    with open(path, "wb") as f:
        f.write(write_pnml(wfnet))
