# Copyright 2026 The quefrency Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import os
import shutil
import sys
import tempfile


class Host:
    """Every file, environment and console side effect of the CLI.

    The library modules never reach for the filesystem on their own; the
    command-line tool funnels its reads and writes through a Host so the
    tests can swap in an in-memory fake.
    """

    def __init__(self):
        self.stdin = sys.stdin
        self.stdout = sys.stdout
        self.stderr = sys.stderr

    def chdir(self, *comps):
        return os.chdir(self.join(*comps))

    def cpu_count(self):
        return os.cpu_count() or 1

    def dirname(self, path):
        return os.path.dirname(path)

    def exists(self, *comps):
        return os.path.exists(self.join(*comps))

    def getcwd(self):
        return os.getcwd()

    def getenv(self, name, default=None):
        return os.environ.get(name, default)

    def join(self, *comps):
        return os.path.join(*comps)

    def maybe_mkdir(self, *comps):
        path = self.join(*comps)
        if path and not os.path.exists(path):
            os.makedirs(path)

    def mkdtemp(self, **kwargs):
        return tempfile.mkdtemp(**kwargs)

    def print_(self, msg='', end='\n', stream=None):
        stream = stream or self.stdout
        stream.write(str(msg) + end)
        stream.flush()

    def rmtree(self, path):
        shutil.rmtree(path, ignore_errors=True)

    def read_binary_file(self, path):
        with open(path, 'rb') as fp:
            return fp.read()

    def read_text_file(self, path):
        return self.read_binary_file(path).decode('utf8')

    def write_binary_file(self, path, contents):
        with open(path, 'wb') as fp:
            fp.write(contents)

    def write_text_file(self, path, contents):
        self.write_binary_file(path, contents.encode('utf8'))
