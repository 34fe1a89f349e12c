#!/usr/bin/env python3

"""
Report history: one row per CLI run, with the structured report as a JSON payload.
Rows are looked up by id or by the SHA-256 digest of the input file.
"""

import sqlite3
import os
import json
import uuid
import logging
from datetime import datetime
from contextlib import contextmanager

from config import DEFAULT_REPORT_DB

logger = logging.getLogger(__name__)

SCHEMA = (
    '''CREATE TABLE IF NOT EXISTS reports (
        id TEXT PRIMARY KEY,
        command TEXT NOT NULL,
        input_digest TEXT,
        prime INTEGER NOT NULL,
        status TEXT NOT NULL,
        exit_code INTEGER NOT NULL,
        payload TEXT NOT NULL,
        created_at TEXT NOT NULL,
        peak_rss_kb INTEGER DEFAULT NULL
    )''',
    'CREATE INDEX IF NOT EXISTS reports_by_digest ON reports (input_digest, created_at)',
)

SUMMARY_FIELDS = ('id', 'command', 'status', 'exit_code', 'prime', 'input_digest', 'created_at', 'peak_rss_kb')


class ReportStore:
    def __init__(self, db_path=DEFAULT_REPORT_DB):
        """Open (and create when missing) the report history database"""
        os.makedirs(os.path.dirname(os.path.abspath(db_path)), exist_ok=True)
        self.db_path = db_path
        with self._connect() as conn:
            for statement in SCHEMA:
                conn.execute(statement)

    @contextmanager
    def _connect(self):
        """Connection yielding sqlite3.Row rows; commits on success, rolls back on error"""
        conn = sqlite3.connect(self.db_path)
        conn.row_factory = sqlite3.Row
        try:
            yield conn
            conn.commit()
        except Exception:
            conn.rollback()
            raise
        finally:
            conn.close()

    def add_report(self, command, input_digest, prime, status, exit_code, payload,
                   peak_rss_kb=None, report_id=None, created_at=None):
        """
        Store one command run
        :param command: CLI command name
        :param input_digest: SHA-256 of the input file, or None for generated input
        :param prime: field characteristic used
        :param status: "ok" or "failed"
        :param exit_code: process exit status
        :param payload: structured report (JSON-serializable)
        :param peak_rss_kb: resident memory high-water mark
        :return: Report ID
        """
        report_id = report_id or str(uuid.uuid4())
        created_at = created_at or datetime.now().isoformat()
        with self._connect() as conn:
            conn.execute(
                'INSERT INTO reports (id, command, input_digest, prime, status, exit_code, payload, '
                'created_at, peak_rss_kb) VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?)',
                (report_id, command, input_digest, prime, status, exit_code,
                 json.dumps(payload, sort_keys=True), created_at, peak_rss_kb))
        logger.debug("Recorded %s report %s", command, report_id)
        return report_id

    @staticmethod
    def _row(row):
        record = {key: row[key] for key in SUMMARY_FIELDS}
        record['payload'] = json.loads(row['payload'])
        return record

    def _select(self, where, params, limit=None, offset=0):
        query = f'SELECT * FROM reports {where} ORDER BY created_at DESC'
        if limit is not None:
            query += ' LIMIT ? OFFSET ?'
            params = list(params) + [limit, offset]
        with self._connect() as conn:
            return [self._row(row) for row in conn.execute(query, params).fetchall()]

    def get_reports(self, limit=20, offset=0):
        """
        Get stored runs, newest first
        :param limit: Maximum number of reports to return
        :param offset: Offset for pagination
        :return: List of reports
        """
        return self._select('', [], limit, offset)

    def get_report_by_id(self, report_id):
        """
        Get a report by its ID
        :param report_id: Report ID
        :return: Report data or None if not found
        """
        rows = self._select('WHERE id = ?', [report_id])
        return rows[0] if rows else None

    def find_by_digest(self, input_digest, command=None, limit=None):
        """
        Earlier runs on the same input
        :param input_digest: SHA-256 of the input file
        :param command: restrict to one command
        :return: List of reports, newest first
        """
        if command is None:
            return self._select('WHERE input_digest = ?', [input_digest], limit)
        return self._select('WHERE input_digest = ? AND command = ?', [input_digest, command], limit)
