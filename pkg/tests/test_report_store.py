#!/usr/bin/env python3

import unittest
import os
import sys
import sqlite3
import tempfile
import shutil

# Add src directory to Python path
sys.path.append(os.path.join(os.path.dirname(os.path.dirname(__file__)), "src"))

from report_store import ReportStore


class TestReportStore(unittest.TestCase):
    def setUp(self):
        """Set up test environment with a temporary database"""
        self.test_dir = tempfile.mkdtemp()
        self.db_path = os.path.join(self.test_dir, "nested", "reports.db")
        self.store = ReportStore(self.db_path)

    def tearDown(self):
        """Clean up test environment"""
        shutil.rmtree(self.test_dir)

    def test_add_report(self):
        """Test adding a report and reading it back"""
        payload = {"command": "homology", "result": {"alpha": [1, 0]}}
        report_id = self.store.add_report("homology", "abc", 5, "ok", 0, payload, peak_rss_kb=1024)

        report = self.store.get_report_by_id(report_id)
        self.assertIsNotNone(report)
        self.assertEqual(report['command'], "homology")
        self.assertEqual(report['prime'], 5)
        self.assertEqual(report['payload'], payload)
        self.assertEqual(report['peak_rss_kb'], 1024)
        self.assertTrue(os.path.exists(self.db_path))

    def test_missing_report(self):
        """Test that an unknown id gives None"""
        self.assertIsNone(self.store.get_report_by_id("nope"))

    def test_get_reports_pagination(self):
        """Test report pagination, newest first"""
        for i in range(5):
            self.store.add_report("check", None, 3, "ok", 0, {"i": i}, report_id=f"r-{i}",
                                  created_at=f"2024-01-0{i + 1}T00:00:00")

        # Case 1: Get all reports
        result = self.store.get_reports(limit=10, offset=0)
        self.assertEqual(len(result), 5)
        self.assertEqual(result[0]['id'], "r-4")

        # Case 2: Get first 2 reports
        self.assertEqual(len(self.store.get_reports(limit=2, offset=0)), 2)

        # Case 3: Offset beyond total count
        self.assertEqual(len(self.store.get_reports(limit=2, offset=5)), 0)

    def test_find_by_digest(self):
        """Test looking up earlier runs on the same input"""
        self.store.add_report("homology", "d1", 5, "ok", 0, {}, created_at="2024-01-01T00:00:00")
        self.store.add_report("minimal", "d1", 5, "failed", 3, {}, created_at="2024-01-02T00:00:00")
        self.store.add_report("homology", "d2", 5, "ok", 0, {})

        self.assertEqual([r['command'] for r in self.store.find_by_digest("d1")], ["minimal", "homology"])
        only = self.store.find_by_digest("d1", command="minimal")
        self.assertEqual(len(only), 1)
        self.assertEqual(only[0]['exit_code'], 3)

    def test_find_by_digest_limit(self):
        """Test that only the newest runs come back under a limit"""
        for i in range(3):
            self.store.add_report("homology", "d1", 5, "ok", 0, {"i": i}, created_at=f"2024-01-0{i + 1}T00:00:00")
        newest = self.store.find_by_digest("d1", limit=1)
        self.assertEqual([r['payload'] for r in newest], [{"i": 2}])

    def test_duplicate_id_is_rolled_back(self):
        """Test that a failed insert leaves the store usable"""
        self.store.add_report("check", None, 3, "ok", 0, {}, report_id="same")
        with self.assertRaises(sqlite3.IntegrityError):
            self.store.add_report("check", None, 3, "ok", 0, {}, report_id="same")
        self.assertEqual(len(self.store.get_reports()), 1)
        self.assertEqual(ReportStore(self.db_path).get_report_by_id("same")['command'], "check")


if __name__ == '__main__':
    unittest.main()
