"""
Test the report backends and the collection JSON codec
"""

import json
import os
import shutil
import tempfile
import unittest
from fractions import Fraction

import numpy as np

from sparselab import (CsvReportStorage, DomainError, ExperimentReport, JsonReportStorage,
                       MeasSet, SetFamily, ShearDirection, SparseCollection, build_shear_family,
                       build_space, build_tower, tail_experiment, write_report)
from sparselab.collections import laminar_collection
from sparselab.storage import (collection_from_json, collection_to_json, dump_collection,
                               format_cell, load_collection, shear_family_to_json, storage_for)


def sample_report():
    report = ExperimentReport("demo", ["name", "value", "ratio", "pass"], seed=7,
                              params={"p": 2.0, "N": [1, 2]}, summary={"failures": 1})
    report.add_row("a", 1, 0.1 + 0.2, True)
    report.add_row("b, c", np.int64(2), Fraction(1, 3), np.bool_(False))
    report.runtime = 12.5
    return report


class TestFormatCell(unittest.TestCase):
    def test_values(self):
        self.assertEqual(format_cell(True), "true")
        self.assertEqual(format_cell(np.bool_(False)), "false")
        self.assertEqual(format_cell(0.1 + 0.2), "0.3")
        self.assertEqual(format_cell(1 / 3), "0.333333333333333")
        self.assertEqual(format_cell(np.float64(2.0)), "2")
        self.assertEqual(format_cell(float("inf")), "inf")
        self.assertEqual(format_cell(None), "")
        self.assertEqual(format_cell([1, 2.5]), "1;2.5")
        self.assertEqual(format_cell(np.int64(5)), "5")


class TestReportStorage(unittest.TestCase):
    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_csv(self):
        path = os.path.join(self.temp_dir, "out", "r.csv")
        write_report(sample_report(), CsvReportStorage(path))
        with open(path, "rb") as fh:
            data = fh.read()
        self.assertNotIn(b"\r", data)
        self.assertEqual(data.decode("utf-8"),
                         'name,value,ratio,pass\na,1,0.3,true\n"b, c",2,0.333333333333333,false\n')

    def test_json_key_order(self):
        storage = write_report(sample_report(), JsonReportStorage())
        data = json.loads(storage.text)
        self.assertEqual(list(data), ["experiment", "seed", "params", "columns", "rows", "summary"])
        self.assertEqual(data["rows"][1], {"name": "b, c", "value": 2, "ratio": 1 / 3,
                                           "pass": False})
        self.assertNotIn("runtime", storage.text)
        self.assertTrue(storage.text.endswith("}\n"))

    def test_reruns_are_byte_identical(self):
        space = build_space(1, 5)
        texts = []
        for _ in range(2):
            report = tail_experiment([("tower", build_tower(space, space.whole(), 5))])
            texts.append(write_report(report, storage_for("csv")).text)
            texts.append(write_report(report, storage_for("json")).text)
        self.assertEqual(texts[0], texts[2])
        self.assertEqual(texts[1], texts[3])

    def test_rejected_row(self):
        report = sample_report()
        report.rows.append(["short"])
        with self.assertRaises(DomainError):
            write_report(report, CsvReportStorage())

    def test_unknown_format(self):
        with self.assertRaises(DomainError):
            storage_for("xml")


class TestCollectionCodec(unittest.TestCase):
    def setUp(self):
        self.space = build_space(1, 4)
        self.tower = build_tower(self.space, self.space.whole(), 4, "left")
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_sparse_round_trip(self):
        data = collection_to_json(self.tower, portions=True)
        self.assertEqual(data["gamma"], "16/31")
        self.assertEqual(data["sets"][0], [[0, 16]])
        back = collection_from_json(json.loads(json.dumps(data)))
        self.assertIsInstance(back, SparseCollection)
        self.assertEqual(back.sets, self.tower.sets)
        self.assertEqual(back.gamma, Fraction(16, 31))
        self.assertEqual(back.portions, self.tower.portions)

    def test_tampered_portions(self):
        data = collection_to_json(self.tower, portions=True)
        data["portions"][0][0][1] = "1"
        with self.assertRaises(DomainError):
            collection_from_json(data)

    def test_laminar_without_gamma(self):
        c = laminar_collection([MeasSet.interval(self.space, 0, 4), MeasSet.interval(self.space, 0, 2)])
        back = collection_from_json(collection_to_json(c))
        self.assertNotIn("gamma", collection_to_json(c))
        self.assertNotIsInstance(back, SparseCollection)
        self.assertEqual(back.parent, (None, 0))

    def test_non_laminar_family(self):
        family = SetFamily([MeasSet.interval(self.space, 0, 8), MeasSet.interval(self.space, 4, 12)])
        back = collection_from_json(collection_to_json(family))
        self.assertIs(type(back), SetFamily)
        data = collection_to_json(family)
        data["gamma"] = "1/2"
        with self.assertRaises(DomainError):
            collection_from_json(data)

    def test_malformed(self):
        with self.assertRaises(DomainError):
            collection_from_json({"sets": []})

    def test_file_round_trip(self):
        path = os.path.join(self.temp_dir, "tower.json")
        text = dump_collection(self.tower, path, portions=True)
        self.assertTrue(text.endswith("\n"))
        self.assertEqual(load_collection(path).sets, self.tower.sets)

    def test_shear_metadata(self):
        plane = build_space(2, 3)
        family = build_shear_family(plane, ShearDirection(3, 3), 1, 1.0, bands=[2, 5])
        data = shear_family_to_json(family)
        self.assertEqual(data["metadata"], {"slope": 3 / 8, "a": 3, "swap": False, "bands": [2, 5]})
        self.assertEqual(collection_from_json(data).sets, family.collection.sets)


if __name__ == '__main__':
    unittest.main()
